#include <afevo/genome.hpp>
#include <afevo/rng.hpp>

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "support/oracles.hpp"

using namespace afevo;
using Catch::Approx;

TEST_CASE("SplitMix64 reference sequence", "[rng]") {
    RngStream rng(0);
    CHECK(rng.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(rng.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(rng.next_u64() == 0x06c45d188009454fULL);
}

TEST_CASE("uniform draws stay in range and cover it", "[rng]") {
    RngStream rng(3);
    std::vector<int> hits(11, 0);
    for (int i = 0; i < 11000; ++i) {
        const auto k = rng.uniform_index(11);
        REQUIRE(k < 11);
        ++hits[k];
    }
    for (int h : hits) CHECK(h > 800);
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
    }
    CHECK(rng.uniform_index(1) == 0);
}

TEST_CASE("genome text form", "[genome]") {
    const Genome g = parse_genome("Sin|(+:Swish:Swish)");
    CHECK(g.left == Expr::leaf(Primitive::Sin));
    CHECK(serialize(g.right) == "(+:Swish:Swish)");
    CHECK(serialize(g) == "Sin|(+:Swish:Swish)");
    CHECK(g.node_count() == 4);
    CHECK_THROWS_AS(parse_genome("Swish"), SyntaxError);
    CHECK_THROWS_AS(parse_genome("Swish|Swish|Swish"), SyntaxError);
    try {
        parse_genome("Swish|(min:ELU)");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.position() == 6 + 8);
    }
}

TEST_CASE("piece dispatch", "[genome]") {
    const double sigma1 = 1.0 / (1.0 + std::exp(-1.0));
    const Genome elish_like = parse_genome("(*:ELU:Sigmoid)|Swish");
    const DualValue at2 = genome_value_dual(elish_like, 2.0);
    CHECK(at2.value == value(Primitive::Swish, 2.0));
    CHECK(at2.deriv == derivative(Primitive::Swish, 2.0));

    const Genome sin_swish = parse_genome("Sin|(+:Swish:Swish)");
    CHECK(genome_value_dual(sin_swish, 1.0).value == Approx(2.0 * sigma1).epsilon(1e-15));
    CHECK(genome_value_dual(sin_swish, 1.0).value == Approx(1.4621171572600098).epsilon(1e-15));
    CHECK(genome_value_dual(sin_swish, -1.0).value == std::sin(-1.0));

    const Genome split = parse_genome("Sigmoid|Linear");
    CHECK(genome_value_dual(split, 0.0) == eval_dual(split.right, 0.0));
    CHECK(genome_value_dual(split, -0.0) == eval_dual(split.right, 0.0));
}

TEST_CASE("inheritance swaps genes at the cutoff", "[genome][crossover]") {
    const Genome mom = parse_genome("ELU|Sin");
    const Genome dad = parse_genome("Swish|(max:ReLU:Linear)");
    const auto [a, b] = inheritance(mom, dad);
    CHECK(serialize(a) == "ELU|(max:ReLU:Linear)");
    CHECK(serialize(b) == "Swish|Sin");

    const auto [c, d] = inheritance(mom, mom);
    CHECK(c == mom);
    CHECK(d == mom);
}

TEST_CASE("inheritance preserves the gene multiset", "[genome][crossover][property]") {
    RngStream rng(21);
    for (int i = 0; i < 500; ++i) {
        const Genome mom = testing::random_genome(rng, 5);
        const Genome dad = testing::random_genome(rng, 5);
        const auto [a, b] = inheritance(mom, dad);
        auto before = testing::gene_strings({&mom, &dad});
        auto after = testing::gene_strings({&a, &b});
        std::sort(before.begin(), before.end());
        std::sort(after.begin(), after.end());
        REQUIRE(before == after);
    }
}

TEST_CASE("hybrid layout", "[genome][crossover]") {
    const Genome mom = parse_genome("ELU|Swish");
    const Genome dad = parse_genome("Sin|ReLU");
    const auto [a, b] = hybrid_with(mom, dad, Operator::Min, Operator::Add, 8);
    CHECK(serialize(a) == "(min:ELU:Sin)|(+:Swish:ReLU)");
    CHECK(serialize(b) == "(min:Sin:ELU)|(+:ReLU:Swish)");
    CHECK(a.left.depth() == 2);
}

TEST_CASE("hybrid offspring share operators with swapped operands", "[genome][crossover][property]") {
    RngStream rng(22);
    for (int i = 0; i < 500; ++i) {
        const Genome mom = testing::random_genome(rng, 4);
        const Genome dad = testing::random_genome(rng, 4);
        const auto [a, b] = hybrid(mom, dad, rng, 8);
        REQUIRE(a.left.op() == b.left.op());
        REQUIRE(a.right.op() == b.right.op());
        REQUIRE(a.left.left() == mom.left);
        REQUIRE(a.left.right() == dad.left);
        REQUIRE(b.left.left() == dad.left);
        REQUIRE(b.left.right() == mom.left);
        REQUIRE(a.right.left() == mom.right);
        REQUIRE(a.right.right() == dad.right);
        REQUIRE(b.right.left() == dad.right);
        REQUIRE(b.right.right() == mom.right);
        REQUIRE(a.left.depth() == 1 + std::max(mom.left.depth(), dad.left.depth()));
    }
}

TEST_CASE("hybrid falls back to inheritance past max depth", "[genome][crossover]") {
    RngStream rng(23);
    for (int i = 0; i < 300; ++i) {
        const Genome mom = testing::random_genome(rng, 6);
        const Genome dad = testing::random_genome(rng, 6);
        const auto [a, b] = hybrid(mom, dad, rng, 6);
        REQUIRE(a.depth() <= 6);
        REQUIRE(b.depth() <= 6);
        if (std::max(mom.depth(), dad.depth()) == 6) {
            const auto [ia, ib] = inheritance(mom, dad);
            REQUIRE(a == ia);
            REQUIRE(b == ib);
        }
    }
}

TEST_CASE("crossover coin", "[genome][crossover]") {
    const Genome mom = parse_genome("ELU|Swish");
    const Genome dad = parse_genome("Sin|ReLU");
    RngStream rng(24);
    OperatorConfig cfg;
    cfg.p_hybrid = 0.0;
    for (int i = 0; i < 100; ++i) REQUIRE(crossover(mom, dad, rng, cfg) == inheritance(mom, dad));
    cfg.p_hybrid = 1.0;
    for (int i = 0; i < 100; ++i) REQUIRE_FALSE(crossover(mom, dad, rng, cfg).first.left.is_leaf());

    // 3 sigma of Binomial(10^4, 0.5) is 150, i.e. a fraction within +-0.015
    cfg.p_hybrid = 0.5;
    int hybrids = 0;
    for (int i = 0; i < 10000; ++i) {
        if (!crossover(mom, dad, rng, cfg).first.left.is_leaf()) ++hybrids;
    }
    CHECK(hybrids / 10000.0 >= 0.48);
    CHECK(hybrids / 10000.0 <= 0.52);
}

TEST_CASE("mutation replaces one gene with a primitive", "[genome][mutation]") {
    const Genome g = parse_genome("(max:(+:(min:ELU:ReLU):Swish):(*:ELU:Linear))|Swish");
    const Genome m = mutate_with(g, GeneSide::Left, Primitive::ReLU);
    CHECK(serialize(m) == "ReLU|Swish");
    CHECK(m.left.node_count() == 1);

    RngStream rng(25);
    for (int i = 0; i < 100; ++i) REQUIRE(mutate(g, rng, 0.0) == g);

    for (int i = 0; i < 500; ++i) {
        const Genome src = testing::random_genome(rng, 4);
        const Genome out = mutate(src, rng, 1.0);
        const bool left_kept = out.left == src.left;
        const bool right_kept = out.right == src.right;
        REQUIRE((left_kept || right_kept));
        if (!left_kept) REQUIRE(out.left.is_leaf());
        if (!right_kept) REQUIRE(out.right.is_leaf());
    }
}

TEST_CASE("operators replay identically from a seed", "[genome][property]") {
    auto transcript = [](std::uint64_t seed) {
        RngStream rng(seed);
        OperatorConfig cfg;
        std::string out;
        for (int i = 0; i < 200; ++i) {
            const Genome mom = testing::random_genome(rng, 3);
            const Genome dad = testing::random_genome(rng, 3);
            auto [a, b] = crossover(mom, dad, rng, cfg);
            out += serialize(mutate(a, rng, cfg.p_mutate)) + ';' + serialize(mutate(b, rng, cfg.p_mutate)) + '\n';
        }
        return out;
    };
    CHECK(transcript(99) == transcript(99));
    CHECK(transcript(99) != transcript(100));
}
