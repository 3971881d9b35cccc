// Trail search drivers: minimum-activity differential search and the
// pattern sweep that lists impossible input/output word patterns.

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "difftrail/builtin_ciphers.hpp"
#include "difftrail/search.hpp"

using namespace difftrail;

namespace {

// 8-bit toy cipher: one 4-bit s-box on each nibble, then swap the nibbles.
// Small enough to brute-force every differential, so the pattern sweep can
// be checked against ground truth.
const char* swap_cipher_json = R"({
  "name": "swap8", "mode": "bit", "state_bits": 8, "word_bits": 4,
  "sboxes": { "s": "c 5 6 b 9 0 a d 3 e f 8 4 7 1 2" },
  "rounds": [ [ { "kind": "sbox", "sbox": "s",
                  "groups": [[0,1,2,3],[4,5,6,7]] },
                { "kind": "pbox", "perm": [4,5,6,7,0,1,2,3] } ] ]
})";

int swap_round(const std::vector<int>& sbox, int x) {
    int hi = sbox[static_cast<std::size_t>((x >> 4) & 0xf)];
    int lo = sbox[static_cast<std::size_t>(x & 0xf)];
    return (lo << 4) | hi;  // nibble swap after substitution
}

// true differential reachability of the toy cipher for one fuzzy pattern:
// input difference confined to word `i`, output difference to word `j`
bool fuzzy_pattern_possible(const std::vector<int>& sbox, int i, int j) {
    for (int dx = 1; dx < 256; ++dx) {
        int in_word = (dx & 0xf0) ? ((dx & 0x0f) ? -1 : 0) : 1;
        if (in_word != i) continue;
        for (int x = 0; x < 256; ++x) {
            int dy = swap_round(sbox, x) ^ swap_round(sbox, x ^ dx);
            int out_word = (dy & 0xf0) ? ((dy & 0x0f) ? -1 : 0) : (dy ? 1 : -1);
            if (out_word == j) return true;
        }
    }
    return false;
}

SearchQuery fuzzy_query(const CipherSpec& spec, int rounds) {
    SearchQuery q;
    q.spec = spec;
    q.rounds = rounds;
    q.attack = AttackKind::impossible;
    q.granularity = Granularity::fuzzy;
    return q;
}

}  // namespace

TEST_CASE("pattern enumeration sizes follow the granularity") {
    const CipherSpec& gift = builtin_specs().at("gift64");
    CHECK(enumerate_patterns(gift, Granularity::fuzzy).size() == 256);    // 16*16
    CHECK(enumerate_patterns(gift, Granularity::equal).size() == 3840);   // *15
    CHECK(enumerate_patterns(gift, Granularity::targeted).size() == 57600);

    const CipherSpec& aes = builtin_specs().at("aes_word");
    CHECK(enumerate_patterns(aes, Granularity::fuzzy).size() == 256);
    CHECK_THROWS_AS(enumerate_patterns(aes, Granularity::equal), std::invalid_argument);
    CHECK_THROWS_AS(enumerate_patterns(aes, Granularity::targeted),
                    std::invalid_argument);
}

TEST_CASE("patterns render as hex states with wildcard markers") {
    const CipherSpec& gift = builtin_specs().at("gift64");
    auto [in, out] = pattern_strings(gift, PatternTask{3, 5, 0xa, 0});
    CHECK(in == "000a000000000000");
    CHECK(out == "00000-0000000000");
    auto [in2, out2] = pattern_strings(gift, PatternTask{0, 15, 0, 1});
    CHECK(in2 == "*000000000000000");
    CHECK(out2 == "0000000000000001");

    const CipherSpec& aes = builtin_specs().at("aes_word");
    auto [win, wout] = pattern_strings(aes, PatternTask{2, 9, 0, 0});
    CHECK(win == "00*0000000000000");  // one character per word
    CHECK(wout == "000000000-000000");
}

TEST_CASE("differential search returns a proved minimum with its trail") {
    SearchQuery q;
    q.spec = builtin_specs().at("gift64");
    q.rounds = 1;
    TrailResult r = search_differential(q);
    REQUIRE(r.status == SolveStatus::optimal);
    CHECK(r.proved_minimal);
    CHECK(r.active_sboxes == 1);
    CHECK(r.nodes > 0);
    REQUIRE(r.trail.round_states.size() == 2);
    CHECK(r.trail.active_sboxes == 1);
    // the single best transition of this s-box has probability 6/16
    CHECK(r.probability_bound_log2 == Catch::Approx(std::log2(6.0 / 16.0)));
    CHECK(r.trail.log2_probability <= r.probability_bound_log2 + 1e-9);
}

TEST_CASE("queries are validated before any model is built") {
    SearchQuery q;
    q.spec = builtin_specs().at("gift64");

    SECTION("attack kind must match the entry point") {
        q.attack = AttackKind::impossible;
        q.granularity = Granularity::fuzzy;
        CHECK_THROWS_AS(search_differential(q), std::invalid_argument);
        q.attack = AttackKind::differential;
        q.granularity.reset();
        CHECK_THROWS_AS(search_impossible(q), std::invalid_argument);
    }
    SECTION("granularity belongs to impossible search only") {
        q.granularity = Granularity::equal;
        CHECK_THROWS_AS(search_differential(q), std::invalid_argument);
        q.attack = AttackKind::impossible;
        q.granularity.reset();
        CHECK_THROWS_AS(search_impossible(q), std::invalid_argument);
    }
    SECTION("round count must be positive") {
        q.rounds = 0;
        CHECK_THROWS_AS(search_differential(q), std::invalid_argument);
    }
}

TEST_CASE("an all-zero input difference admits no trail") {
    const CipherSpec& spec = parse_spec(swap_cipher_json);
    UnrolledModel u = generate_bit_model(spec, 1, default_inequalities(spec));
    for (int v : u.input_vars) u.model.fix(v, 0);
    SolveResult r = solve(u.model);
    CHECK(r.status == SolveStatus::infeasible);
}

TEST_CASE("fuzzy pattern sweep agrees with brute-forced reachability") {
    const CipherSpec& spec = parse_spec(swap_cipher_json);
    std::vector<int> sbox;
    for (int v : spec.sboxes.at("s").table) sbox.push_back(v);

    ImpossibleReport rep = search_impossible(fuzzy_query(spec, 1));
    CHECK(rep.granularity == Granularity::fuzzy);
    CHECK(rep.unresolved_count == 0);
    CHECK(rep.total_count + rep.possible_count == 4);

    int oracle_impossible = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            if (!fuzzy_pattern_possible(sbox, i, j)) ++oracle_impossible;
    CHECK(rep.total_count == oracle_impossible);

    // the nibble swap forces the active word to move: only (0,1) and (1,0)
    // are reachable in one round
    REQUIRE(rep.entries.size() == 2);
    CHECK(rep.entries[0].input_pattern == "*0");
    CHECK(rep.entries[0].output_pattern == "-0");
    CHECK(rep.entries[1].input_pattern == "0*");
    CHECK(rep.entries[1].output_pattern == "0-");
    CHECK(rep.entries[0].proved);
    CHECK(rep.entries[1].proved);

    CHECK(report_machine_lines(rep) == "*0\t-0\t1\n0*\t0-\t1\n");
    std::string table = report_table(rep);
    CHECK(table.find("granularity: fuzzy") != std::string::npos);
    CHECK(table.find("impossible: 2   possible: 2   unresolved: 0") !=
          std::string::npos);

    // two rounds swap back: now the diagonal patterns are the reachable ones
    ImpossibleReport rep2 = search_impossible(fuzzy_query(spec, 2));
    CHECK(report_machine_lines(rep2) == "*0\t0-\t1\n0*\t-0\t1\n");
}

TEST_CASE("worker count does not change the report") {
    const CipherSpec& spec = parse_spec(swap_cipher_json);
    SearchQuery q = fuzzy_query(spec, 1);
    ImpossibleReport one = search_impossible(q);
    q.jobs = 3;
    ImpossibleReport three = search_impossible(q);
    CHECK(report_machine_lines(one) == report_machine_lines(three));
    CHECK(one.possible_count == three.possible_count);
}

TEST_CASE("equal-value sweep of the toy cipher matches the table oracle") {
    const CipherSpec& spec = parse_spec(swap_cipher_json);
    std::vector<int> sbox;
    for (int v : spec.sboxes.at("s").table) sbox.push_back(v);

    SearchQuery q = fuzzy_query(spec, 1);
    q.granularity = Granularity::equal;
    ImpossibleReport rep = search_impossible(q);
    CHECK(rep.total_count + rep.possible_count == 60);  // 2*2*15
    CHECK(rep.unresolved_count == 0);

    // oracle: value v in word i propagates to value v in word j
    int oracle = 0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int v = 1; v < 16; ++v) {
                int dx = i == 0 ? v << 4 : v;
                bool possible = false;
                for (int x = 0; x < 256 && !possible; ++x) {
                    int dy = swap_round(sbox, x) ^ swap_round(sbox, x ^ dx);
                    int want = j == 0 ? v << 4 : v;
                    possible = dy == want;
                }
                if (!possible) ++oracle;
            }
    CHECK(rep.total_count == oracle);
}

TEST_CASE("fallback inequality sets are exact for the transition table") {
    const CipherSpec& gift = builtin_specs().at("gift64");
    auto ineqs = default_inequalities(gift);
    REQUIRE(ineqs.size() == 1);
    const InequalitySet& set = ineqs.at("gift");
    CHECK(set.dim == 8);
    CHECK(set.items.size() <= 40);  // reduced well below the 237 hull facets

    TransitionSet ts = transition_sets(compute_ddt(gift.sboxes.at("gift")));
    CHECK(verify_exact_model(set, ts));

    const CipherSpec& aes = builtin_specs().at("aes_word");
    CHECK(default_inequalities(aes).empty());  // word mode needs none
}

TEST_CASE("a tiny budget yields an unproved bound or runs out entirely") {
    SearchQuery q;
    q.spec = builtin_specs().at("gift64");
    q.rounds = 3;
    q.budget_seconds = 0.02;
    try {
        TrailResult r = search_differential(q);
        CHECK(r.status == SolveStatus::feasible_budget);
        CHECK_FALSE(r.proved_minimal);
        CHECK(r.active_sboxes >= 3);  // incumbent can only overshoot the optimum
    } catch (const BudgetExhausted&) {
        SUCCEED("no incumbent within the budget");
    }
}
