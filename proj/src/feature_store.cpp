#include "swsmil/feature_store.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "swsmil/error.hpp"

namespace swsmil {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kStoreVersion = 1;

// Feature payloads are little-endian float32 on every platform we target;
// bail out loudly rather than silently mis-reading on a big-endian host.
static_assert(std::endian::native == std::endian::little, "feature store assumes a little-endian host");

std::vector<float> read_f32_file(const fs::path& path, size_t expected_count) {
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in) throw IntegrityError("missing feature file: " + path.string());
    const auto byte_count = static_cast<size_t>(in.tellg());
    if (byte_count != expected_count * sizeof(float)) {
        throw IntegrityError("feature file " + path.string() + " has " + std::to_string(byte_count) +
                             " bytes, manifest expects " + std::to_string(expected_count * sizeof(float)));
    }
    in.seekg(0);
    std::vector<float> buf(expected_count);
    in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(byte_count));
    if (!in) throw IoError("short read on feature file: " + path.string());
    return buf;
}

}  // namespace

Dataset load_feature_store(const fs::path& dir) {
    const fs::path manifest_path = dir / "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw FormatError("missing manifest: " + manifest_path.string());

    ordered_json manifest;
    try {
        in >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("corrupt manifest " + manifest_path.string() + ": " + e.what());
    }

    try {
        if (manifest.at("version").get<int>() != kStoreVersion) {
            throw FormatError("unsupported feature store version");
        }
        const int dim = manifest.at("dim").get<int>();
        if (dim < 1) throw FormatError("manifest dim must be >= 1");

        auto class_names = manifest.at("classes").get<std::vector<std::string>>();
        Dataset ds;
        ds.priority = ClassPriority::ascending(std::move(class_names));

        for (const auto& entry : manifest.at("bags")) {
            Bag bag;
            bag.id = entry.at("id").get<std::string>();
            bag.label = entry.at("label").get<int>();
            const int n = entry.at("num_instances").get<int>();
            if (n < 1) throw FormatError("bag " + bag.id + ": num_instances must be >= 1");
            const fs::path file = dir / entry.at("file").get<std::string>();

            const auto buf = read_f32_file(file, static_cast<size_t>(n) * dim);
            bag.features = Matrix(n, dim);
            for (size_t i = 0; i < buf.size(); ++i) {
                if (!std::isfinite(buf[i])) {
                    throw DataError("bag " + bag.id + " contains a non-finite feature value");
                }
                bag.features.raw()[i] = static_cast<double>(buf[i]);
            }

            if (entry.contains("instance_labels")) {
                bag.oracle_instance_labels = entry.at("instance_labels").get<std::vector<int>>();
            }

            Split split = Split::Train;
            if (entry.contains("split")) {
                const auto parsed = split_from_string(entry.at("split").get<std::string>());
                if (!parsed) throw FormatError("bag " + bag.id + ": unknown split value");
                split = *parsed;
            }
            ds.split[bag.id] = split;
            ds.bags.push_back(std::move(bag));
        }

        ds.validate();
        return ds;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("manifest " + manifest_path.string() + " is malformed: " + e.what());
    }
}

void save_feature_store(const Dataset& ds, const fs::path& dir) {
    ds.validate();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

    ordered_json manifest;
    manifest["version"] = kStoreVersion;
    manifest["dim"] = ds.dim();
    manifest["classes"] = ds.priority.names();

    ordered_json bag_entries = ordered_json::array();
    for (const Bag& bag : ds.bags) {
        const std::string file_name = bag.id + ".bin";
        ordered_json entry;
        entry["id"] = bag.id;
        entry["label"] = bag.label;
        entry["num_instances"] = bag.num_instances();
        entry["file"] = file_name;
        if (bag.oracle_instance_labels) entry["instance_labels"] = *bag.oracle_instance_labels;
        entry["split"] = to_string(ds.split.at(bag.id));
        bag_entries.push_back(std::move(entry));

        std::ofstream out(dir / file_name, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + (dir / file_name).string() + " for writing");
        std::vector<float> buf(bag.features.size());
        for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(bag.features.raw()[i]);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!out) throw IoError("write failure on " + (dir / file_name).string());
    }
    manifest["bags"] = std::move(bag_entries);

    std::ofstream out(dir / "manifest.json", std::ios::trunc);
    if (!out) throw IoError("cannot open manifest for writing in " + dir.string());
    out << manifest.dump(2) << "\n";
    if (!out) throw IoError("write failure on manifest in " + dir.string());
}

}  // namespace swsmil
