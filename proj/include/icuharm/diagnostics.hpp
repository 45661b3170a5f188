#pragma once

#include <cstddef>
#include <functional>
#include <mutex>
#include <string>
#include <vector>

namespace icuharm {

struct Diagnostic {
    std::string category;
    std::string message;
};

/// Collects non-fatal findings (unit mismatches, dropped rows, row-count
/// warnings). Thread-safe; an optional sink sees each entry as it arrives.
class Diagnostics {
public:
    using Sink = std::function<void(const Diagnostic&)>;

    Diagnostics() = default;
    explicit Diagnostics(Sink sink) : sink_(std::move(sink)) {}

    void report(std::string category, std::string message) {
        std::lock_guard lock(mu_);
        entries_.push_back({std::move(category), std::move(message)});
        if (sink_) sink_(entries_.back());
    }

    std::vector<Diagnostic> entries() const {
        std::lock_guard lock(mu_);
        return entries_;
    }

    std::size_t count(const std::string& category) const {
        std::lock_guard lock(mu_);
        std::size_t n = 0;
        for (const auto& d : entries_) n += d.category == category;
        return n;
    }

    void clear() {
        std::lock_guard lock(mu_);
        entries_.clear();
    }

private:
    mutable std::mutex mu_;
    std::vector<Diagnostic> entries_;
    Sink sink_;
};

}  // namespace icuharm
