/*
 Copyright 2026 The reachkit Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "reachkit/dp_baseline.hpp"

namespace reachkit {

namespace {

constexpr std::array<char, 8> kMagic = {'R', 'K', 'V', 'G', 'R', 'I', 'D', '1'};

void put_u64(std::ostream& os, std::uint64_t v) {
    std::array<char, 8> bytes;
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os.write(bytes.data(), bytes.size());
}

std::uint64_t get_u64(std::istream& is) {
    std::array<unsigned char, 8> bytes{};
    if (!is.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
        throw std::runtime_error("value grid: truncated file");
    }
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | bytes[i];
    return v;
}

void put_i64(std::ostream& os, std::int64_t v) { put_u64(os, static_cast<std::uint64_t>(v)); }
void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
std::int64_t get_i64(std::istream& is) { return static_cast<std::int64_t>(get_u64(is)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_value_grid(const ValueGrid& grid, const std::string& path, const std::string& metadata_json) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("value grid: cannot open " + path);
    const Eigen::Index n = grid.state_dim();
    os.write(kMagic.data(), kMagic.size());
    put_i64(os, n);
    put_i64(os, grid.horizon);
    for (auto c : grid.counts) put_i64(os, c);
    put_f64(os, grid.spacing);
    for (Eigen::Index i = 0; i < n; ++i) put_f64(os, grid.lower(i));
    for (Eigen::Index i = 0; i < n; ++i) put_f64(os, grid.upper(i));
    for (const auto& step : grid.values)
        for (double v : step) put_f64(os, v);
    if (!os) throw std::runtime_error("value grid: write failed for " + path);

    nlohmann::ordered_json side;
    side["format"] = "reachkit-value-grid";
    side["version"] = 1;
    side["state_dim"] = n;
    side["horizon"] = grid.horizon;
    side["counts"] = grid.counts;
    side["spacing"] = grid.spacing;
    side["lower"] = std::vector<double>(grid.lower.data(), grid.lower.data() + n);
    side["upper"] = std::vector<double>(grid.upper.data(), grid.upper.data() + n);
    side["payload"] = "float64 little-endian, (horizon+1) steps, row-major per step, last coordinate fastest";
    side["metadata"] = nlohmann::ordered_json::parse(metadata_json);
    std::ofstream js(path + ".json");
    if (!js) throw std::runtime_error("value grid: cannot open sidecar for " + path);
    js << side.dump(2) << '\n';
}

ValueGrid read_value_grid(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("value grid: cannot open " + path);
    std::array<char, 8> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw std::runtime_error("value grid: bad magic in " + path);

    ValueGrid grid;
    const std::int64_t n = get_i64(is);
    if (n < 1 || n > 16) throw std::runtime_error("value grid: implausible dimension");
    grid.horizon = static_cast<int>(get_i64(is));
    if (grid.horizon < 0) throw std::runtime_error("value grid: negative horizon");
    for (std::int64_t i = 0; i < n; ++i) grid.counts.push_back(get_i64(is));
    grid.spacing = get_f64(is);
    grid.lower.resize(n);
    grid.upper.resize(n);
    for (std::int64_t i = 0; i < n; ++i) grid.lower(i) = get_f64(is);
    for (std::int64_t i = 0; i < n; ++i) grid.upper(i) = get_f64(is);
    const std::int64_t nodes = grid.node_count();
    grid.values.assign(static_cast<std::size_t>(grid.horizon) + 1, std::vector<double>(nodes));
    for (auto& step : grid.values)
        for (auto& v : step) v = get_f64(is);
    return grid;
}

}  // namespace reachkit
