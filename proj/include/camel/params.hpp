#pragma once

#include <memory>
#include <string>
#include <vector>

#include "camel/errors.hpp"
#include "camel/kernels.hpp"

namespace camel {

// One named parameter block (a weight matrix or bias row) inside the flat
// parameter vector.
struct ParamEntry {
    std::string name;
    size_t offset = 0;
    int rows = 0;
    int cols = 0;

    size_t count() const { return static_cast<size_t>(rows) * static_cast<size_t>(cols); }
    bool operator==(const ParamEntry&) const = default;
};

class ParameterLayout {
public:
    explicit ParameterLayout(std::vector<ParamEntry> entries) : entries_(std::move(entries)) {
        size_t expect = 0;
        for (const auto& e : entries_) {
            if (e.offset != expect) throw InputError("layout: non-contiguous entry " + e.name);
            expect += e.count();
        }
        total_ = expect;
    }

    const std::vector<ParamEntry>& entries() const { return entries_; }
    size_t total_size() const { return total_; }

    bool operator==(const ParameterLayout& o) const { return entries_ == o.entries_; }

private:
    std::vector<ParamEntry> entries_;
    size_t total_ = 0;
};

using LayoutPtr = std::shared_ptr<const ParameterLayout>;

// Flat, ordered view of all trainable weights of a network. Arithmetic is
// layout-checked so that vectors from different architectures can never be
// combined silently.
template <typename T>
struct ParameterVector {
    LayoutPtr layout;
    std::vector<T> values;

    ParameterVector() = default;
    explicit ParameterVector(LayoutPtr l) : layout(std::move(l)), values(layout->total_size(), T(0)) {}

    size_t size() const { return values.size(); }

    T* block(size_t entry_index) { return values.data() + layout->entries()[entry_index].offset; }
    const T* block(size_t entry_index) const { return values.data() + layout->entries()[entry_index].offset; }

    void check_same_layout(const ParameterVector& o) const {
        if (!layout || !o.layout) throw InputError("parameter vector: missing layout");
        if (layout == o.layout) return;
        if (!(*layout == *o.layout)) throw InputError("parameter vector: layout mismatch");
    }

    // this += a * other
    void add_scaled(const ParameterVector& o, T a) {
        check_same_layout(o);
        kern::axpy(values.size(), a, o.values.data(), values.data());
    }

    void scale_by(T a) { kern::scale(values.size(), a, values.data()); }

    void fill(T v) { std::fill(values.begin(), values.end(), v); }

    template <typename U>
    ParameterVector<U> cast() const {
        ParameterVector<U> out(layout);
        for (size_t i = 0; i < values.size(); ++i) out.values[i] = static_cast<U>(values[i]);
        return out;
    }

    bool operator==(const ParameterVector& o) const {
        return layout && o.layout && *layout == *o.layout && values == o.values;
    }
};

}  // namespace camel
