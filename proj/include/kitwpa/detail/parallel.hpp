#pragma once

#include <algorithm>
#include <future>
#include <thread>
#include <vector>

namespace kitwpa::detail {

// Applies f to every item on up to hardware_concurrency threads; results come
// back in input order. The first exception thrown by f is rethrown.
template <class In, class F>
auto parallel_map(const std::vector<In>& items, F f) -> std::vector<decltype(f(items.front()))> {
    using Out = decltype(f(items.front()));
    const size_t n = items.size();
    const size_t workers = std::max<size_t>(1, std::min<size_t>(n, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        std::vector<Out> out;
        out.reserve(n);
        for (const auto& x : items) out.push_back(f(x));
        return out;
    }
    const size_t chunk = (n + workers - 1) / workers;
    std::vector<std::future<std::vector<Out>>> futures;
    for (size_t start = 0; start < n; start += chunk) {
        const size_t stop = std::min(n, start + chunk);
        futures.push_back(std::async(std::launch::async, [&items, &f, start, stop] {
            std::vector<Out> part;
            part.reserve(stop - start);
            for (size_t j = start; j < stop; ++j) part.push_back(f(items[j]));
            return part;
        }));
    }
    std::vector<Out> out;
    out.reserve(n);
    for (auto& fut : futures) {
        auto part = fut.get();
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return out;
}

}  // namespace kitwpa::detail
