#pragma once

#include "plmcl/ndcore.hpp"

#include <string>

namespace plmcl {

void save_mlp_json(const MlpParams& params, const std::string& path);
MlpParams load_mlp_json(const std::string& path);

}  // namespace plmcl
