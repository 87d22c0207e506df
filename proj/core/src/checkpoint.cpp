#include "brlstm/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "brlstm/error.hpp"

namespace brlstm {

using nlohmann::json;

std::string checkpoint_to_json(const Model& model) {
  const LstmParams& p = model.params;
  p.validate();
  const ActivationKind& a = model.activation;
  json doc;
  doc["format_version"] = 1;
  doc["dims"] = {{"input", p.input_dim}, {"hidden", p.hidden_dim}, {"output", p.output_dim}};
  doc["head"] = std::string(to_string(model.head));
  doc["activation"] = {
      {"type", std::string(to_string(a.type))},
      {"slope", a.slope},
      {"paths", a.paths},
      {"epsilon", a.epsilon},
      {"sampling", std::string(to_string(a.sampling))},
      {"input_grad", a.input_grad == BrownianInputGrad::pathwise ? "pathwise" : "zero"},
  };
  doc["alpha"] = p.alpha;
  json tensors = json::object();
  const auto ts = p.tensors();
  for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k) {
    const Matrix& m = *ts[k];
    tensors[std::string(LstmParams::kTensorNames[k])] = {
        {"rows", m.rows()},
        {"cols", m.cols()},
        {"data", std::vector<double>(m.values().begin(), m.values().end())}};
  }
  doc["tensors"] = std::move(tensors);
  return doc.dump(1);
}

Model checkpoint_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.at("format_version").get<int>() != 1) {
      throw DataError("unsupported checkpoint format_version");
    }
    Model m;
    const auto& dims = doc.at("dims");
    m.params = LstmParams::zeros(dims.at("input").get<std::size_t>(),
                                 dims.at("hidden").get<std::size_t>(),
                                 dims.at("output").get<std::size_t>());
    m.head = parse_head(doc.at("head").get<std::string>());
    const auto& a = doc.at("activation");
    m.activation.type = parse_activation_type(a.at("type").get<std::string>());
    m.activation.slope = a.at("slope").get<double>();
    m.activation.paths = a.at("paths").get<int>();
    m.activation.epsilon = a.at("epsilon").get<double>();
    m.activation.sampling = parse_sampling(a.at("sampling").get<std::string>());
    const auto grad = a.at("input_grad").get<std::string>();
    if (grad != "pathwise" && grad != "zero") throw DataError("unknown input_grad '" + grad + "'");
    m.activation.input_grad =
        grad == "pathwise" ? BrownianInputGrad::pathwise : BrownianInputGrad::zero;
    m.params.alpha = doc.at("alpha").get<double>();

    const auto& tensors = doc.at("tensors");
    auto ts = m.params.tensors();
    for (std::size_t k = 0; k < LstmParams::kTensorCount; ++k) {
      const auto& t = tensors.at(std::string(LstmParams::kTensorNames[k]));
      *ts[k] = Matrix(t.at("rows").get<std::size_t>(), t.at("cols").get<std::size_t>(),
                      t.at("data").get<std::vector<double>>());
    }
    m.params.validate();
    m.activation.validate();
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("invalid checkpoint: ") + e.what());
  }
}

void save_checkpoint(const Model& model, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint " + path.string());
  out << checkpoint_to_json(model) << '\n';
}

Model load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

}  // namespace brlstm
