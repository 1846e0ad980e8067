#include "nicki/checkpoint.hpp"

#include "nicki/errors.hpp"

#include <nlohmann/json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

namespace nicki {

namespace {

static_assert(sizeof(double) == 8);

std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* ext)
{
    return std::filesystem::path(stem.string() + ext);
}

void write_le(std::ofstream& out, double v)
{
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char buf[8];
    for (int b = 0; b < 8; ++b) {
        buf[b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(buf), 8);
}

double read_le(const unsigned char* p)
{
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(p[b]) << (8 * b);
    }
    return std::bit_cast<double>(bits);
}

} // namespace

void save_checkpoint(const NamedTensors& tensors, const std::filesystem::path& stem)
{
    std::ofstream bin(with_suffix(stem, ".bin"), std::ios::binary);
    if (!bin) {
        throw std::runtime_error("cannot write " + with_suffix(stem, ".bin").string());
    }
    nlohmann::json meta;
    meta["format"] = "nicki-checkpoint";
    meta["version"] = 1;
    meta["tensors"] = nlohmann::json::array();
    std::uint64_t offset = 0;
    for (const auto& [name, t] : tensors) {
        meta["tensors"].push_back(
            {{"name", name}, {"rows", t.rows()}, {"cols", t.cols()}, {"offset", offset}});
        const Matrix& v = t.value();
        for (Index i = 0; i < v.size(); ++i) {
            write_le(bin, v.data()[i]);
        }
        offset += static_cast<std::uint64_t>(v.size()) * 8;
    }
    std::ofstream js(with_suffix(stem, ".json"));
    js << meta.dump(2) << "\n";
}

NamedTensors load_checkpoint(const std::filesystem::path& stem)
{
    const auto json_path = with_suffix(stem, ".json");
    const auto bin_path = with_suffix(stem, ".bin");
    std::ifstream js(json_path);
    if (!js) {
        throw ParseError("cannot open " + json_path.string());
    }
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(js);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(json_path.string() + ": " + e.what());
    }
    if (meta.value("format", "") != "nicki-checkpoint" || meta.value("version", 0) != 1) {
        throw ParseError(json_path.string() + ": unsupported checkpoint format");
    }
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) {
        throw ParseError("cannot open " + bin_path.string());
    }
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(bin)),
                                     std::istreambuf_iterator<char>());
    NamedTensors out;
    for (const auto& entry : meta.at("tensors")) {
        const auto rows = entry.at("rows").get<Index>();
        const auto cols = entry.at("cols").get<Index>();
        const auto offset = entry.at("offset").get<std::uint64_t>();
        const auto count = static_cast<std::uint64_t>(rows * cols);
        if (rows < 0 || cols < 0 || offset + count * 8 > bytes.size()) {
            throw ParseError(bin_path.string() + ": tensor '" +
                             entry.at("name").get<std::string>() + "' exceeds file size");
        }
        Matrix v(rows, cols);
        for (std::uint64_t i = 0; i < count; ++i) {
            v.data()[i] = read_le(bytes.data() + offset + 8 * i);
        }
        out.emplace_back(entry.at("name").get<std::string>(), Tensor(std::move(v), true));
    }
    return out;
}

void assign_tensors(const NamedTensors& target, const NamedTensors& source)
{
    std::map<std::string, const Tensor*> by_name;
    for (const auto& [name, t] : source) {
        by_name[name] = &t;
    }
    for (const auto& [name, t] : target) {
        auto it = by_name.find(name);
        if (it == by_name.end()) {
            throw ContractError("assign_tensors: missing tensor '" + name + "'");
        }
        const Tensor& src = *it->second;
        if (src.rows() != t.rows() || src.cols() != t.cols()) {
            throw DimensionError("assign_tensors: shape mismatch for '" + name + "'");
        }
        Tensor dst = t;
        dst.value() = src.value();
    }
}

} // namespace nicki
