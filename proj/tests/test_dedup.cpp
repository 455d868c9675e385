#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "vcf/dedup.hpp"
#include "vcf/hash.hpp"

using namespace vcf::dedup;

namespace {

using Set = std::unordered_set<std::string>;

DedupEntry entry(const std::string& id, Set tokens, long stars = 0) {
    DedupEntry e;
    e.file_id = id;
    e.repo_id = "github.com/o/" + id;
    e.relative_path = id + ".v";
    e.stars = stars;
    e.tokens = std::move(tokens);
    return e;
}

}  // namespace

TEST_CASE("jaccard examples") {
    CHECK(jaccard({"a", "b", "c"}, {"b", "c", "d"}) == doctest::Approx(0.5));
    CHECK(jaccard({"x", "y"}, {"x", "y"}) == 1.0);
    CHECK(jaccard({"x"}, {"y"}) == 0.0);
    CHECK(jaccard({}, {}) == 1.0);
}

TEST_CASE("jaccard properties") {
    std::mt19937 gen(5);
    std::uniform_int_distribution<int> token(0, 20);
    for (int trial = 0; trial < 200; ++trial) {
        Set a, b;
        for (int i = 0; i < token(gen); ++i)
            a.insert("t" + std::to_string(token(gen)));
        for (int i = 0; i < token(gen); ++i)
            b.insert("t" + std::to_string(token(gen)));
        double ab = jaccard(a, b);
        CHECK(ab == jaccard(b, a));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        if (!a.empty()) CHECK(jaccard(a, a) == 1.0);
    }
}

TEST_CASE("exact_dedup groups identical content") {
    std::string c1 = "module m; endmodule\n";
    std::string c2 = "module m; endmodule\n";
    std::string c3 = "module m; /* x */ endmodule\n";
    std::vector<DedupEntry> entries = {entry("a", {}), entry("b", {}),
                                       entry("c", {})};
    entries[0].content = &c1;
    entries[1].content = &c2;
    entries[2].content = &c3;

    DedupResult r = exact_dedup(entries);
    CHECK(r.kept_ids.size() == 2);
    CHECK(r.clusters.size() == 2);
}

TEST_CASE("exact_dedup normalizes newlines") {
    std::string lf = "wire w;\nwire v;\n";
    std::string crlf = "wire w;\r\nwire v;\r\n";
    std::vector<DedupEntry> entries = {entry("a", {}), entry("b", {})};
    entries[0].content = &lf;
    entries[1].content = &crlf;
    CHECK(exact_dedup(entries).kept_ids.size() == 1);
}

TEST_CASE("near_dedup clusters above threshold and closes transitively") {
    // J(a,b) = J(b,c) = 17/20 = 0.85, J(a,c) = 14/20 = 0.7: a and c join
    // only through b.
    Set a, b, c;
    for (int i = 1; i <= 20; ++i) b.insert("t" + std::to_string(i));
    for (int i = 4; i <= 20; ++i) a.insert("t" + std::to_string(i));
    for (int i = 1; i <= 17; ++i) c.insert("t" + std::to_string(i));

    std::vector<DedupEntry> entries = {entry("a", a), entry("b", b),
                                       entry("c", c), entry("d", {"zz"})};
    DedupResult r = near_dedup(entries, 0.8, NearDedupMode::Exact);
    REQUIRE(r.clusters.size() == 2);
    CHECK(r.clusters[0].member_ids ==
          std::vector<std::string>{"a", "b", "c"});
    CHECK(r.kept_ids.size() == 2);
}

TEST_CASE("near_dedup threshold validation") {
    CHECK_THROWS_AS(near_dedup({}, 0.0, NearDedupMode::Exact),
                    std::invalid_argument);
    CHECK_THROWS_AS(near_dedup({}, 1.5, NearDedupMode::Exact),
                    std::invalid_argument);
}

TEST_CASE("representative: highest stars, then smallest path") {
    Set t{"x", "y", "z"};
    std::vector<DedupEntry> entries = {entry("b", t, 5), entry("a", t, 9),
                                       entry("c", t, 9)};
    DedupResult r = near_dedup(entries, 0.8, NearDedupMode::Exact);
    REQUIRE(r.clusters.size() == 1);
    CHECK(r.clusters[0].representative_id == "a");  // stars 9, repo o/a < o/c
}

TEST_CASE("output invariant under input permutation") {
    std::mt19937 gen(13);
    std::vector<DedupEntry> entries;
    for (int i = 0; i < 30; ++i) {
        Set t;
        for (int k = 0; k < 8; ++k)
            t.insert("t" + std::to_string((i / 3) * 8 + k));  // triples alike
        entries.push_back(entry("f" + std::to_string(i), t, i % 4));
    }
    DedupResult base = near_dedup(entries, 0.8, NearDedupMode::Exact);
    for (int trial = 0; trial < 5; ++trial) {
        std::shuffle(entries.begin(), entries.end(), gen);
        DedupResult r = near_dedup(entries, 0.8, NearDedupMode::Exact);
        CHECK(r.kept_ids == base.kept_ids);
        REQUIRE(r.clusters.size() == base.clusters.size());
        for (std::size_t i = 0; i < r.clusters.size(); ++i)
            CHECK(r.clusters[i].member_ids == base.clusters[i].member_ids);
    }
}

TEST_CASE("near_dedup is idempotent on its own kept set") {
    std::vector<DedupEntry> entries;
    for (int i = 0; i < 20; ++i) {
        Set t;
        for (int k = 0; k < 6; ++k)
            t.insert("t" + std::to_string((i / 2) * 6 + k));
        entries.push_back(entry("f" + std::to_string(i), t));
    }
    DedupResult first = near_dedup(entries, 0.8, NearDedupMode::Exact);
    std::vector<DedupEntry> kept;
    for (const DedupEntry& e : entries)
        if (std::find(first.kept_ids.begin(), first.kept_ids.end(),
                      e.file_id) != first.kept_ids.end())
            kept.push_back(e);
    DedupResult second = near_dedup(kept, 0.8, NearDedupMode::Exact);
    CHECK(second.kept_ids == first.kept_ids);
}

TEST_CASE("minhash determinism and set semantics") {
    Set t{"alpha", "beta", "gamma"};
    MinHashSignature a = minhash(t, 64, 123);
    MinHashSignature b = minhash(t, 64, 123);
    CHECK(a.values == b.values);
    MinHashSignature c = minhash(t, 64, 124);
    CHECK(a.values != c.values);
    CHECK(minhash({}, 64, 123).empty_set);
    CHECK_THROWS_AS(minhash(t, 0, 1), std::invalid_argument);
}

TEST_CASE("minhash slot agreement estimates jaccard") {
    // Sets built to have Jaccard exactly 0.5: |A∩B| = 10, |A∪B| = 20.
    std::mt19937 gen(99);
    double total_agreement = 0.0;
    const int trials = 1000, hashes = 128;
    for (int trial = 0; trial < trials; ++trial) {
        Set a, b;
        for (int i = 0; i < 10; ++i) {
            std::string shared = "s" + std::to_string(trial) + "_" +
                                 std::to_string(i);
            a.insert(shared);
            b.insert(shared);
        }
        for (int i = 0; i < 5; ++i) {
            a.insert("a" + std::to_string(trial) + "_" + std::to_string(i));
            b.insert("b" + std::to_string(trial) + "_" + std::to_string(i));
        }
        REQUIRE(jaccard(a, b) == doctest::Approx(0.5));
        MinHashSignature sa = minhash(a, hashes, 7);
        MinHashSignature sb = minhash(b, hashes, 7);
        int agree = 0;
        for (int h = 0; h < hashes; ++h)
            if (sa.values[static_cast<std::size_t>(h)] ==
                sb.values[static_cast<std::size_t>(h)])
                ++agree;
        total_agreement += static_cast<double>(agree) / hashes;
    }
    double mean = total_agreement / trials;
    CHECK(mean == doctest::Approx(0.5).epsilon(0.1));
    CHECK(std::abs(mean - 0.5) < 0.05);
}

TEST_CASE("accelerated mode adds no false edges") {
    // Pairs below threshold must never cluster, whatever LSH proposes.
    std::mt19937 gen(21);
    std::vector<DedupEntry> entries;
    for (int i = 0; i < 50; ++i) {
        Set t;
        for (int k = 0; k < 12; ++k)
            t.insert("t" + std::to_string(i) + "_" + std::to_string(k));
        t.insert("common");  // slight overlap everywhere
        entries.push_back(entry("f" + std::to_string(i), t));
    }
    DedupResult r = near_dedup(entries, 0.8, NearDedupMode::Accelerated);
    CHECK(r.kept_ids.size() == entries.size());  // all dissimilar, all kept
}
