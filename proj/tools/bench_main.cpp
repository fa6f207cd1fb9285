// Compares the serial reference paths (--threads 1) of the parallel kernels
// against their OpenMP versions on fixed workloads.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ccdim/dimensions.hpp"
#include "ccdim/reductions.hpp"
#include "ccdim/rng.hpp"
#include "ccdim/verify.hpp"

using namespace ccdim;

namespace {

double time_ms(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

ConceptClass random_class(std::size_t n_elements, std::size_t n_concepts, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < n_elements; ++i)
        labels.push_back("e" + std::to_string(i));
    std::vector<BitRow> rows;
    for (std::size_t c = 0; c < n_concepts; ++c) {
        BitRow row(n_elements);
        for (std::size_t x = 0; x < n_elements; ++x)
            row.set(x, rng.coin());
        rows.push_back(std::move(row));
    }
    return ConceptClass::make(std::move(labels), std::move(rows));
}

ConceptClass thresholds(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t i = 1; i <= n; ++i)
        labels.push_back(std::to_string(i));
    std::vector<BitRow> rows;
    for (std::size_t t = 0; t <= n; ++t) {
        BitRow row(n);
        for (std::size_t i = 0; i < n; ++i)
            row.set(i, i + 1 <= t);
        rows.push_back(std::move(row));
    }
    return ConceptClass::make(std::move(labels), std::move(rows));
}

LabelCoverInstance dense_instance(std::uint32_t na, std::uint32_t nb, std::uint32_t per_pair,
                                  std::uint32_t alphabet, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::string> a_names, b_names;
    for (std::uint32_t i = 0; i < na; ++i)
        a_names.push_back("a" + std::to_string(i));
    for (std::uint32_t j = 0; j < nb; ++j)
        b_names.push_back("b" + std::to_string(j));
    std::vector<LabelCoverEdge> edges;
    for (std::uint32_t i = 0; i < na; ++i)
        for (std::uint32_t j = 0; j < nb; ++j)
            for (std::uint32_t t = 0; t < per_pair; ++t) {
                LabelCoverEdge e;
                e.a = i;
                e.b = j;
                for (std::uint32_t s = 0; s < alphabet; ++s)
                    e.projection.push_back(static_cast<std::uint32_t>(rng.below(alphabet)));
                edges.push_back(std::move(e));
            }
    return LabelCoverInstance::make(std::move(a_names), std::move(b_names), alphabet,
                                    std::move(edges));
}

void row(const std::string& kernel, const std::string& size, double serial_ms,
         double parallel_ms) {
    std::printf("%-28s %-26s %10.1f %10.1f %8.2fx\n", kernel.c_str(), size.c_str(), serial_ms,
                parallel_ms, parallel_ms > 0 ? serial_ms / parallel_ms : 0.0);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs parallel kernel comparison"};
    int threads = 0;
    app.add_option("--threads", threads, "parallel thread count (0 = all)");
    CLI11_PARSE(app, argc, argv);

    std::printf("%-28s %-26s %10s %10s %9s\n", "kernel", "workload", "serial/ms", "par/ms",
                "speedup");

    {
        const ConceptClass cls = random_class(40, 2000, 7);
        int d_serial = 0, d_par = 0;
        const double ts = time_ms([&] {
            DimOptions o;
            o.threads = 1;
            d_serial = vc_dimension(cls, o).dimension;
        });
        const double tp = time_ms([&] {
            DimOptions o;
            o.threads = threads;
            d_par = vc_dimension(cls, o).dimension;
        });
        row("shattered-set scan", "|U|=40 |C|=2000 (d=" + std::to_string(d_serial) + ")", ts, tp);
        if (d_serial != d_par)
            std::printf("!! result mismatch\n");
    }

    {
        const ConceptClass cls = thresholds(60);
        const int d = ls_dimension(cls).dimension;
        bool rs = false, rp = false;
        const double ts = time_ms([&] {
            DimOptions o;
            o.threads = 1;
            rs = ls_at_most(cls, d - 1, o);
        });
        const double tp = time_ms([&] {
            DimOptions o;
            o.threads = threads;
            rp = ls_at_most(cls, d - 1, o);
        });
        row("mistake-tree decision", "thresholds n=60 (d=" + std::to_string(d) + ")", ts, tp);
        if (rs != rp)
            std::printf("!! result mismatch\n");
    }

    {
        const ConceptClass cls = random_class(26, 1500, 11);
        const int d = ls_dimension(cls).dimension;
        bool rs = false, rp = false;
        const double ts = time_ms([&] {
            DimOptions o;
            o.threads = 1;
            rs = ls_at_most(cls, d - 1, o);
        });
        const double tp = time_ms([&] {
            DimOptions o;
            o.threads = threads;
            rp = ls_at_most(cls, d - 1, o);
        });
        row("mistake-tree decision", "|U|=26 |C|=1500 (d=" + std::to_string(d) + ")", ts, tp);
        if (rs != rp)
            std::printf("!! result mismatch\n");
    }

    {
        const LabelCoverInstance inst = dense_instance(6, 6, 60, 16, 3);
        const BlockPartition part = partition_blocks(inst, 6, 1);
        std::vector<std::uint32_t> blocks{0, 1, 2, 3, 4, 5};
        PartialAssignment sigma(inst.num_vertices());
        for (std::uint32_t v = 0; v < inst.num_vertices(); ++v)
            sigma.set(v, 0);
        const std::uint64_t trials = 200000;
        PassEstimate es, ep;
        const double ts = time_ms(
            [&] { es = estimate_pass_probability(inst, part, blocks, sigma, trials, 5, 0, 1); });
        const double tp = time_ms([&] {
            ep = estimate_pass_probability(inst, part, blocks, sigma, trials, 5, 0, threads);
        });
        row("matching pass trials", "|E|=2160 trials=200k", ts, tp);
        if (es.passes != ep.passes)
            std::printf("!! result mismatch\n");
    }

    return 0;
}
