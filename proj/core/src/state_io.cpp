#include "flts/state_io.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "flts/errors.hpp"

namespace flts {

namespace {

constexpr char kMagic[8] = {'F', 'L', 'T', 'S', 'G', 'B', '1', '\n'};

std::string shortest(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

nlohmann::json meta_to_json(const StateMeta& meta) {
    nlohmann::json j;
    j["format"] = "flts-state";
    j["version"] = 1;
    j["M"] = meta.M;
    j["seed"] = meta.seed;
    j["s"] = meta.s;
    j["psi_mode"] = meta.psi_mode;
    j["generator"] = meta.generator;
    for (const auto& [k, v] : meta.extra) j["extra"][k] = v;
    return j;
}

StateMeta meta_from_json(const nlohmann::json& j) {
    StateMeta meta;
    meta.M = j.at("M").get<int>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.s = j.at("s").get<double>();
    meta.psi_mode = j.value("psi_mode", "zero");
    meta.generator = j.value("generator", "");
    if (j.contains("extra")) {
        for (const auto& [k, v] : j.at("extra").items()) meta.extra[k] = v.get<std::string>();
    }
    return meta;
}

void write_doubles(std::ostream& os, std::span<const Complex> data) {
    os.write(reinterpret_cast<const char*>(data.data()),
             static_cast<std::streamsize>(data.size() * sizeof(Complex)));
}

GBState load_binary(std::istream& is, const std::string& path, StateMeta* meta_out) {
    std::uint32_t header_len = 0;
    is.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
    if (!is || header_len == 0 || header_len > (1u << 20)) {
        throw IoError("corrupt state file header: " + path);
    }
    std::string header(header_len, '\0');
    is.read(header.data(), header_len);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header);
    } catch (const nlohmann::json::exception& e) {
        throw IoError("corrupt state file header in " + path + ": " + e.what());
    }
    StateMeta meta = meta_from_json(j);
    if (meta.M < 4) throw IoError("state file has invalid M: " + path);

    std::vector<Complex> zc(meta.M), ztc(meta.M);
    is.read(reinterpret_cast<char*>(zc.data()), static_cast<std::streamsize>(meta.M * sizeof(Complex)));
    is.read(reinterpret_cast<char*>(ztc.data()), static_cast<std::streamsize>(meta.M * sizeof(Complex)));
    if (!is) throw IoError("truncated state file: " + path);

    GridPtr grid = make_grid(meta.M);
    if (meta_out) *meta_out = meta;
    return GBState{Field::from_coeffs(grid, std::move(zc), true),
                   Field::from_coeffs(grid, std::move(ztc), true)};
}

GBState load_text(std::istream& is, const std::string& path, StateMeta* meta_out) {
    StateMeta meta;
    std::vector<double> z, zt;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            std::string key = line.substr(1, colon - 1);
            std::string value = line.substr(colon + 1);
            auto trim = [](std::string& s) {
                s.erase(0, s.find_first_not_of(" \t"));
                s.erase(s.find_last_not_of(" \t\r") + 1);
            };
            trim(key);
            trim(value);
            if (key == "M") meta.M = std::stoi(value);
            else if (key == "seed") meta.seed = std::stoull(value);
            else if (key == "s") meta.s = std::stod(value);
            else if (key == "psi_mode") meta.psi_mode = value;
            else if (key == "generator") meta.generator = value;
            else meta.extra[key] = value;
            continue;
        }
        std::istringstream row(line);
        double x = 0.0, zv = 0.0, ztv = 0.0;
        if (!(row >> x >> zv >> ztv)) throw IoError("malformed data row in " + path);
        z.push_back(zv);
        zt.push_back(ztv);
    }
    if (meta.M == 0) meta.M = static_cast<int>(z.size());
    if (meta.M < 4 || static_cast<int>(z.size()) != meta.M) {
        throw IoError("state file row count does not match M: " + path);
    }
    GridPtr grid = make_grid(meta.M);
    if (meta_out) *meta_out = meta;
    return GBState{Field::from_real_values(grid, z), Field::from_real_values(grid, zt)};
}

}  // namespace

StateFormat format_for_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        const std::string ext = path.substr(dot);
        if (ext == ".txt" || ext == ".dat") return StateFormat::text;
    }
    return StateFormat::binary;
}

void save_state(const std::string& path, const GBState& state, const StateMeta& meta_in,
                StateFormat format) {
    if (state.z.grid_ptr() != state.zt.grid_ptr()) {
        throw ConfigError("save_state: z and z_t live on different grids");
    }
    StateMeta meta = meta_in;
    meta.M = state.grid().size();
    if (meta.generator.empty()) meta.generator = "unspecified";

    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open for writing: " + path);

    if (format == StateFormat::binary) {
        const std::string header = meta_to_json(meta).dump();
        const auto header_len = static_cast<std::uint32_t>(header.size());
        os.write(kMagic, sizeof(kMagic));
        os.write(reinterpret_cast<const char*>(&header_len), sizeof(header_len));
        os.write(header.data(), header_len);
        write_doubles(os, state.z.coeffs());
        write_doubles(os, state.zt.coeffs());
    } else {
        const auto& g = state.grid();
        os << "# flts-state v1\n";
        os << "# M: " << meta.M << "\n";
        os << "# seed: " << meta.seed << "\n";
        os << "# s: " << shortest(meta.s) << "\n";
        os << "# psi_mode: " << meta.psi_mode << "\n";
        os << "# generator: " << meta.generator << "\n";
        for (const auto& [k, v] : meta.extra) os << "# " << k << ": " << v << "\n";
        os << "# columns: x z zt\n";
        const auto z = state.z.real_values();
        const auto zt = state.zt.real_values();
        for (int j = 0; j < g.size(); ++j) {
            os << shortest(g.node(j)) << " " << shortest(z[j]) << " " << shortest(zt[j]) << "\n";
        }
    }
    if (!os) throw IoError("write failed: " + path);
}

GBState load_state(const std::string& path, StateMeta* meta) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open for reading: " + path);
    char magic[sizeof(kMagic)] = {};
    is.read(magic, sizeof(magic));
    if (is && std::memcmp(magic, kMagic, sizeof(kMagic)) == 0) {
        return load_binary(is, path, meta);
    }
    is.clear();
    is.seekg(0);
    return load_text(is, path, meta);
}

}  // namespace flts
