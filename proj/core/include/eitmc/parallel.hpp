#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace eitmc {

// Streaming mean/variance (Welford), mergeable via Chan's update.
struct RunningStat {
    std::uint64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double x) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }

    void merge(const RunningStat& o) {
        if (o.n == 0) return;
        if (n == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(n), nb = static_cast<double>(o.n);
        const double d = o.mean - mean;
        const double nt = na + nb;
        mean += d * nb / nt;
        m2 += o.m2 + d * d * na * nb / nt;
        n += o.n;
    }

    double variance() const {
        return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    }
    double standard_error() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

// Deterministic parallel map-reduce over path indices. Paths are processed in
// fixed chunks and the per-chunk statistics are merged in chunk order, so the
// result is bit-identical for any worker count.
//
// PerPath has signature void(uint64_t path_index, std::span<double> out) and
// must fill all n_outputs entries.
template <class PerPath>
std::vector<RunningStat> run_paths(std::uint64_t n_paths, std::size_t n_outputs,
                                   int workers, PerPath&& per_path) {
    constexpr std::uint64_t kChunk = 1024;
    const std::uint64_t n_chunks = (n_paths + kChunk - 1) / kChunk;
    std::vector<std::vector<RunningStat>> chunk_stats(
        n_chunks, std::vector<RunningStat>(n_outputs));

    std::atomic<std::uint64_t> next_chunk{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;

    const auto work = [&]() {
        std::vector<double> out(n_outputs);
        try {
            for (;;) {
                const std::uint64_t c = next_chunk.fetch_add(1);
                if (c >= n_chunks || failed.load(std::memory_order_relaxed)) break;
                const std::uint64_t begin = c * kChunk;
                const std::uint64_t end = std::min(begin + kChunk, n_paths);
                auto& stats = chunk_stats[c];
                for (std::uint64_t p = begin; p < end; ++p) {
                    per_path(p, std::span<double>(out));
                    for (std::size_t k = 0; k < n_outputs; ++k)
                        stats[k].add(out[k]);
                }
            }
        } catch (...) {
            std::scoped_lock lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);

    std::vector<RunningStat> total(n_outputs);
    for (std::uint64_t c = 0; c < n_chunks; ++c)
        for (std::size_t k = 0; k < n_outputs; ++k)
            total[k].merge(chunk_stats[c][k]);
    return total;
}

}  // namespace eitmc
