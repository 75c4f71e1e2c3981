#pragma once

#include <iosfwd>

#include "loadcast/model.hpp"

namespace loadcast {

/// Versioned binary checkpoint: a JSON header (config, context set, seed)
/// followed by the named parameter tensors as raw little-endian doubles.
/// Byte-stable for a given model state.
void save_checkpoint(const Model& model, std::ostream& out);
void save_checkpoint(const Model& model, const std::string& path);

Model load_checkpoint(std::istream& in, const std::string& origin);
Model load_checkpoint(const std::string& path);

} // namespace loadcast
