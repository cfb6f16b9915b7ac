#pragma once

#include <string>

#include "json.hpp"
#include "streamx/channel.hpp"

// JSON file formats and the builtin channel spec strings
// ("bsc:p", "bec:p", "zchan:q", "identity:k").

namespace streamx::io {

class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

nlohmann::json dmc_to_json(const Dmc& w);
Dmc dmc_from_json(const nlohmann::json& j);

nlohmann::json input_distribution_to_json(const InputDistribution& p);
InputDistribution input_distribution_from_json(const nlohmann::json& j);

// Builtin constructor string or a path to a channel JSON file.
Dmc parse_channel_spec(const std::string& spec);

nlohmann::json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const nlohmann::json& j);

}  // namespace streamx::io
