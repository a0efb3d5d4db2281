#pragma once

// Deterministic block-parallel map over an integer range. The range is cut
// into fixed-size blocks independent of the worker count, every block is
// evaluated exactly once, and results come back in block order, so any
// sequential fold over them is identical for 1 or n workers.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ptor {

template <class R, class BlockFn>
std::vector<std::vector<R>> map_blocks(std::uint64_t lo, std::uint64_t hi, std::uint64_t block,
                                       unsigned workers, BlockFn&& fn) {
    if (hi < lo) return {};
    block = std::max<std::uint64_t>(block, 1);
    const std::uint64_t nblocks = (hi - lo) / block + 1;
    std::vector<std::vector<R>> out(nblocks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            std::uint64_t i = next.fetch_add(1);
            if (i >= nblocks) return;
            std::uint64_t b_lo = lo + i * block;
            std::uint64_t b_hi = std::min(hi, b_lo + block - 1);
            try {
                out[i] = fn(b_lo, b_hi);
            } catch (...) {
                std::lock_guard lock(err_mu);
                if (!err) err = std::current_exception();
                next.store(nblocks);
                return;
            }
        }
    };
    workers = std::max(1u, workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    if (err) std::rethrow_exception(err);
    return out;
}

} // namespace ptor
