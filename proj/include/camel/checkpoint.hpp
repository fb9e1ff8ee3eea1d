#pragma once

#include <string>

#include "camel/blobfile.hpp"
#include "camel/params.hpp"

namespace camel {

inline nlohmann::ordered_json layout_to_json(const ParameterLayout& layout) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : layout.entries())
        arr.push_back({{"name", e.name}, {"offset", e.offset}, {"rows", e.rows}, {"cols", e.cols}});
    return arr;
}

inline LayoutPtr layout_from_json(const nlohmann::ordered_json& arr) {
    std::vector<ParamEntry> entries;
    for (const auto& e : arr)
        entries.push_back({e.at("name").get<std::string>(), e.at("offset").get<size_t>(), e.at("rows").get<int>(),
                           e.at("cols").get<int>()});
    return std::make_shared<const ParameterLayout>(std::move(entries));
}

inline void save_params(const std::string& path, const ParameterVector<float>& pv) {
    blobio::BlobFile bf;
    bf.meta["format"] = "camel-params-v1";
    bf.meta["layout"] = layout_to_json(*pv.layout);
    bf.blobs.emplace_back("params", pv.values);
    blobio::write_blob_file(path, bf);
}

inline ParameterVector<float> load_params(const std::string& path) {
    blobio::BlobFile bf = blobio::read_blob_file(path);
    if (bf.meta.value("format", "") != "camel-params-v1") throw DataError("checkpoint: not a parameter file: " + path);
    ParameterVector<float> pv(layout_from_json(bf.meta.at("layout")));
    const auto& values = bf.blob("params");
    if (values.size() != pv.size()) throw DataError("checkpoint: value count does not match layout: " + path);
    pv.values = values;
    return pv;
}

}  // namespace camel
