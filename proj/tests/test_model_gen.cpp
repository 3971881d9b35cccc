// Round-function unrolling into MILP models (bit and word granularity) and
// trail decoding.

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "difftrail/builtin_ciphers.hpp"
#include "difftrail/model_gen.hpp"
#include "difftrail/polytope.hpp"
#include "difftrail/sbox.hpp"

using namespace difftrail;

namespace {

// exact per-table inequality sets straight from the transition hulls
std::map<std::string, InequalitySet> hull_inequalities(const CipherSpec& spec) {
    std::map<std::string, InequalitySet> out;
    for (const auto& [name, table] : spec.sboxes)
        out.emplace(name, convex_hull_hrep(transition_sets(compute_ddt(table)).possible).facets);
    return out;
}

const CipherSpec& spec_of(const std::string& name) { return builtin_specs().at(name); }

}  // namespace

TEST_CASE("one unrolled round of a 16-cell SPN has the expected shape") {
    const CipherSpec& gift = spec_of("gift64");
    UnrolledModel u = generate_bit_model(gift, 1, hull_inequalities(gift));
    CHECK(u.rounds == 1);
    CHECK(u.input_vars.size() == 64);
    CHECK(u.output_vars.size() == 64);
    CHECK(u.activity_vars.size() == 16);
    CHECK(u.sbox_uses.size() == 16);
    REQUIRE(u.round_states.size() == 2);
    CHECK(u.round_states.front() == u.input_vars);
    CHECK(u.round_states.back() == u.output_vars);
    REQUIRE(u.model.objective().has_value());
    CHECK(u.model.objective()->size() == 16);
}

TEST_CASE("bit-level round models reach the published activity minima") {
    SECTION("single active cell in round one") {
        const CipherSpec& gift = spec_of("gift64");
        UnrolledModel u = generate_bit_model(gift, 1, hull_inequalities(gift));
        SolveResult r = solve(u.model);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.objective_value == 1);
    }
    SECTION("two rounds of skinny64 activate two cells") {
        const CipherSpec& skinny = spec_of("skinny64");
        UnrolledModel u = generate_bit_model(skinny, 2, hull_inequalities(skinny));
        SolveResult r = solve(u.model);
        REQUIRE(r.status == SolveStatus::optimal);
        CHECK(r.objective_value == 2);
    }
}

TEST_CASE("decoded trails replay through the difference table") {
    const CipherSpec& gift = spec_of("gift64");
    UnrolledModel u = generate_bit_model(gift, 2, hull_inequalities(gift));
    SolveResult r = solve(u.model);
    REQUIRE(r.status == SolveStatus::optimal);
    REQUIRE(r.assignment.has_value());

    DecodedTrail t = decode_assignment(u, *r.assignment);
    REQUIRE(t.round_states.size() == 3);
    for (const auto& s : t.round_states) CHECK(s.size() == 16);  // hex chars
    CHECK(t.active_sboxes == *r.objective_value);
    CHECK(t.round_states.front() != std::string(16, '0'));  // non-trivial input

    // each active cell contributes between -3 and -1.415 bits for this table
    CHECK(t.log2_probability <= -1.41 * t.active_sboxes);
    CHECK(t.log2_probability >= -3.0 * t.active_sboxes);
}

TEST_CASE("decoding rejects assignments whose transitions are impossible") {
    const CipherSpec& gift = spec_of("gift64");
    UnrolledModel u = generate_bit_model(gift, 1, hull_inequalities(gift));
    SolveResult r = solve(u.model);
    REQUIRE(r.assignment.has_value());
    std::vector<long long> broken = *r.assignment;

    // find an active instance and overwrite its output with a difference the
    // table forbids for that input
    const SBoxTable& table = gift.sboxes.begin()->second;
    Ddt ddt = compute_ddt(table);
    bool tampered = false;
    for (const SBoxUse& use : u.sbox_uses) {
        unsigned dx = 0;
        for (std::size_t b = 0; b < use.in_vars.size(); ++b)
            dx = dx << 1 | static_cast<unsigned>(broken[static_cast<std::size_t>(
                     use.in_vars[b])]);
        if (dx == 0) continue;
        for (unsigned dy = 0; dy < 16 && !tampered; ++dy) {
            if (ddt.counts[dx][dy] != 0) continue;
            for (std::size_t b = 0; b < use.out_vars.size(); ++b)
                broken[static_cast<std::size_t>(use.out_vars[b])] =
                    (dy >> (use.out_vars.size() - 1 - b)) & 1;
            tampered = true;
        }
        if (tampered) break;
    }
    REQUIRE(tampered);
    CHECK_THROWS_AS(decode_assignment(u, broken), std::logic_error);

    std::vector<long long> short_vec(3, 0);
    CHECK_THROWS_AS(decode_assignment(u, short_vec), std::length_error);
}

TEST_CASE("generation validates mode, rounds and inequality sets") {
    const CipherSpec& gift = spec_of("gift64");
    const CipherSpec& aes = spec_of("aes_word");
    auto ineqs = hull_inequalities(gift);

    CHECK_THROWS_AS(generate_bit_model(aes, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(generate_word_model(gift, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_bit_model(gift, 0, ineqs), std::invalid_argument);
    CHECK_THROWS_AS(generate_word_model(aes, 0), std::invalid_argument);
    CHECK_THROWS_AS(generate_bit_model(gift, 1, {}), std::invalid_argument);

    auto wrong_dim = ineqs;
    wrong_dim.begin()->second.dim = 6;
    CHECK_THROWS_AS(generate_bit_model(gift, 1, wrong_dim), std::invalid_argument);

    auto empty_set = ineqs;
    empty_set.begin()->second.items.clear();
    CHECK_THROWS_AS(generate_bit_model(gift, 1, empty_set), std::invalid_argument);
}

TEST_CASE("optional strengthening cuts only add redundant constraints") {
    const CipherSpec& gift = spec_of("gift64");
    auto ineqs = hull_inequalities(gift);
    UnrolledModel plain = generate_bit_model(gift, 1, ineqs);

    BitModelOptions opt;
    opt.bijectivity_cuts = true;
    opt.branch_cuts = true;
    UnrolledModel cut = generate_bit_model(gift, 1, ineqs, opt);
    CHECK(cut.model.num_constraints() > plain.model.num_constraints());

    SolveResult a = solve(plain.model);
    SolveResult b = solve(cut.model);
    REQUIRE(a.status == SolveStatus::optimal);
    REQUIRE(b.status == SolveStatus::optimal);
    CHECK(a.objective_value == b.objective_value);
}

TEST_CASE("permutation layers cost no constraints") {
    std::string base = R"({
      "name": "p0", "mode": "bit", "state_bits": 8, "word_bits": 4,
      "sboxes": { "s": "c 5 6 b 9 0 a d 3 e f 8 4 7 1 2" },
      "rounds": [ [ { "kind": "sbox", "sbox": "s",
                      "groups": [[0,1,2,3],[4,5,6,7]] } ] ]
    })";
    std::string with_pbox = base;
    with_pbox.replace(with_pbox.find("\"p0\""), 4, "\"p1\"");
    with_pbox.replace(with_pbox.find("} ] ]"), 5,
                      "}, { \"kind\": \"pbox\", \"perm\": [7,6,5,4,3,2,1,0] } ] ]");

    CipherSpec s0 = parse_spec(base);
    CipherSpec s1 = parse_spec(with_pbox);
    auto ineqs = hull_inequalities(s0);
    UnrolledModel u0 = generate_bit_model(s0, 1, ineqs);
    UnrolledModel u1 = generate_bit_model(s1, 1, ineqs);
    CHECK(u0.model.num_constraints() == u1.model.num_constraints());
    CHECK(u0.model.num_vars() == u1.model.num_vars());
    // the permutation reorders the output wires only
    CHECK(u1.output_vars[0] == u0.output_vars[7]);
}

TEST_CASE("word-granularity models count active words") {
    const CipherSpec& aes = spec_of("aes_word");
    UnrolledModel u = generate_word_model(aes, 1);
    CHECK(u.input_vars.size() == 16);
    CHECK(u.output_vars.size() == 16);
    CHECK(u.activity_vars.size() == 16);

    SolveResult r1 = solve(u.model);
    REQUIRE(r1.status == SolveStatus::optimal);
    CHECK(r1.objective_value == 1);

    DecodedTrail t = decode_assignment(u, *r1.assignment);
    REQUIRE(t.round_states.size() == 2);
    CHECK(t.round_states.front().size() == 16);  // one activity flag per word
    CHECK(t.active_sboxes == 1);
    CHECK(t.log2_probability == 0.0);  // unknown at word granularity

    UnrolledModel u2 = generate_word_model(aes, 2);
    SolveResult r2 = solve(u2.model);
    REQUIRE(r2.status == SolveStatus::optimal);
    CHECK(r2.objective_value == 5);  // single active column through MixColumns
}
