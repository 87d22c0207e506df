#pragma once

#include <filesystem>
#include <string>

#include "brlstm/lstm.hpp"

namespace brlstm {

/// Checkpoint schema (JSON, format_version 1):
///   {"format_version": 1,
///    "dims": {"input": d, "hidden": n, "output": out},
///    "head": "regression" | "classification",
///    "activation": {"type": ..., "slope": ..., "paths": M, "epsilon": ...,
///                   "sampling": "explicit" | "collapsed",
///                   "input_grad": "pathwise" | "zero"},
///    "alpha": a,
///    "tensors": {"w_f": {"rows": r, "cols": c, "data": [row-major]}, ...}}
/// Numbers are written with round-trip precision, so save/load is bit-exact.
std::string checkpoint_to_json(const Model& model);
Model checkpoint_from_json(const std::string& text);

void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

}  // namespace brlstm
