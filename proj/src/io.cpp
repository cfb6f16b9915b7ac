#include "streamx/io.hpp"

#include <filesystem>
#include <fstream>

namespace streamx::io {

nlohmann::json dmc_to_json(const Dmc& w) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t x = 0; x < w.input_size(); ++x) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t y = 0; y < w.output_size(); ++y) row.push_back(w(x, y));
        rows.push_back(std::move(row));
    }
    return {{"input_size", w.input_size()}, {"output_size", w.output_size()}, {"matrix", rows}};
}

Dmc dmc_from_json(const nlohmann::json& j) {
    const auto nx = j.at("input_size").get<std::size_t>();
    const auto ny = j.at("output_size").get<std::size_t>();
    const auto& rows = j.at("matrix");
    if (!rows.is_array() || rows.size() != nx) throw io_error("channel json: bad matrix row count");
    std::vector<double> m;
    m.reserve(nx * ny);
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != ny) throw io_error("channel json: bad matrix row size");
        for (const auto& v : row) m.push_back(v.get<double>());
    }
    return {nx, ny, std::move(m)};
}

nlohmann::json input_distribution_to_json(const InputDistribution& p) {
    return nlohmann::json(p.probs());
}

InputDistribution input_distribution_from_json(const nlohmann::json& j) {
    return InputDistribution(j.get<std::vector<double>>());
}

Dmc parse_channel_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        const std::string arg = spec.substr(colon + 1);
        try {
            if (kind == "bsc") return Dmc::bsc(std::stod(arg));
            if (kind == "bec") return Dmc::bec(std::stod(arg));
            if (kind == "zchan") return Dmc::z_channel(std::stod(arg));
            if (kind == "identity") return Dmc::identity(std::stoul(arg));
        } catch (const std::invalid_argument&) {
            throw;
        } catch (const std::exception& e) {
            throw std::invalid_argument("channel spec '" + spec + "': " + e.what());
        }
        throw std::invalid_argument("unknown channel kind '" + kind + "'");
    }
    if (!std::filesystem::exists(spec))
        throw std::invalid_argument("channel spec '" + spec + "' is neither builtin nor a file");
    return dmc_from_json(load_json_file(spec));
}

nlohmann::json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw io_error("cannot parse '" + path + "': " + e.what());
    }
    return j;
}

void save_json_file(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw io_error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw io_error("write failed for '" + path + "'");
}

}  // namespace streamx::io
