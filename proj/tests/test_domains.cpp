#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "infoplan/domains/guess.hpp"
#include "infoplan/domains/submarine.hpp"
#include "infoplan/domains/weighing.hpp"
#include "infoplan/entropy.hpp"

using namespace infoplan;
using Catch::Approx;

namespace {

double probability_of(const OutcomeDistribution<WeighOutcome>& d, WeighOutcome m) {
    for (const auto& o : d.outcomes())
        if (o.label == m) return o.probability;
    return 0.0;
}

// Dihedral symmetries of a square grid as cell -> cell maps.
std::vector<std::vector<int>> square_symmetries(const Grid& g) {
    REQUIRE(g.width() == g.height());
    const int n = g.width();
    auto build = [&](auto&& f) {
        std::vector<int> map(static_cast<std::size_t>(g.cells()) + 1);
        for (int cell = 1; cell <= g.cells(); ++cell) {
            auto [r, c] = f(g.row(cell), g.col(cell));
            map[static_cast<std::size_t>(cell)] = g.cell_at(r, c);
        }
        return map;
    };
    std::vector<std::vector<int>> maps;
    maps.push_back(build([&](int r, int c) { return std::pair{r, c}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{c, n - 1 - r}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{n - 1 - r, n - 1 - c}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{n - 1 - c, r}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{r, n - 1 - c}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{n - 1 - r, c}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{c, r}; }));
    maps.push_back(build([&](int r, int c) { return std::pair{n - 1 - c, n - 1 - r}; }));
    return maps;
}

} // namespace

TEST_CASE("weighing outcome probabilities and transitions") {
    const WeighingProcess w(9);
    const auto d3 = w.outcome_distribution(0, 3, 2);
    CHECK(probability_of(d3, WeighOutcome::balanced) == Approx(1.0 / 3));
    CHECK(w.transition(0, 3, 2, WeighOutcome::balanced) == 1);

    const auto d4 = w.outcome_distribution(0, 4, 4);
    CHECK(probability_of(d4, WeighOutcome::left_heavier) == Approx(0.5));
    CHECK(w.transition(0, 4, 4, WeighOutcome::left_heavier) == 2);

    // x == u: the balanced branch has probability zero and is omitted.
    CHECK(d4.size() == 2);
    for (const auto& o : d4.outcomes()) CHECK(o.label != WeighOutcome::balanced);
}

TEST_CASE("weighing admissible measurement sets") {
    const WeighingProcess w(9);
    CHECK(w.measurement_set(0, 6) == std::vector<long>{2, 4, 6});
    CHECK(w.measurement_set(0, 7) == std::vector<long>{2, 4, 6});
    CHECK(w.measurement_set(0, 1) == std::vector<long>{0});
}

TEST_CASE("guess outcome probabilities and transitions") {
    const GuessProcess g(8);
    const auto d2 = g.outcome_distribution(0, 2, 1);
    for (const auto& o : d2.outcomes()) CHECK(o.probability == Approx(0.5));
    CHECK(entropy(d2).value == Approx(1.0));

    CHECK(g.transition(0, 4, 2, GuessOutcome::yes) == 2);
    CHECK(g.transition(0, 4, 2, GuessOutcome::no) == 2);

    const auto d3 = g.outcome_distribution(0, 3, 1);
    CHECK(d3.outcomes()[0].probability == Approx(1.0 / 3));
    CHECK(d3.outcomes()[1].probability == Approx(2.0 / 3));
    CHECK(g.transition(0, 3, 1, GuessOutcome::yes) == 1);
    CHECK(g.transition(0, 3, 1, GuessOutcome::no) == 2);
}

TEST_CASE("counting conservation across outcomes") {
    const WeighingProcess w(20);
    for (long x = 2; x <= 20; ++x)
        for (long u : w.measurement_set(0, x)) {
            long total = 0;
            bool seen_balanced = false;
            const auto dist = w.outcome_distribution(0, x, u);
            for (const auto& o : dist.outcomes()) {
                total += w.transition(0, x, u, o.label);
                seen_balanced |= o.label == WeighOutcome::balanced;
            }
            if (!seen_balanced) total += x - u; // omitted zero-probability branch
            CHECK(total == x);
        }
    const GuessProcess g(20);
    for (long x = 2; x <= 20; ++x)
        for (long u : g.measurement_set(0, x)) {
            long total = 0;
            const auto dist = g.outcome_distribution(0, x, u);
            for (const auto& o : dist.outcomes())
                total += g.transition(0, x, u, o.label);
            CHECK(total == x);
        }
}

TEST_CASE("full-resolution identity along isolating outcome paths") {
    // Any outcome path that ends with a single hypothesis accumulates exactly
    // log2(initial count) bits. Checked along the balanced-then-left chain.
    const WeighingProcess w(16);
    long x = 16;
    double accumulated = 0.0;
    while (x > 1) {
        const long u = w.measurement_set(0, x).back(); // largest admissible
        const auto d = w.outcome_distribution(0, x, u);
        const auto& o = d.outcomes().front(); // left-heavier
        accumulated += information_content(o.probability).value;
        x = w.transition(0, x, u, o.label);
    }
    CHECK(accumulated == Approx(4.0).margin(1e-9));
}

TEST_CASE("sonar coverage at center, edge, and corner of the 3x3 grid") {
    const Grid g(3, 3);
    const CellMask empty;
    CHECK(sonar_coverage(g, 5, empty).first == 5);
    CHECK(sonar_coverage(g, 4, empty).first == 4);
    CHECK(sonar_coverage(g, 7, empty).first == 3);
}

TEST_CASE("sonar coverage excludes already-searched cells") {
    const Grid g(3, 3);
    CellMask searched;
    for (int cell : {2, 4, 5, 6, 8}) searched.set(cell);
    auto [count, cells] = sonar_coverage(g, 7, searched);
    CHECK(count == 1);
    CHECK(cells == std::vector<int>{7});
}

TEST_CASE("admissible moves on the 3x3 grid") {
    const Grid g(3, 3);
    auto center = admissible_moves(g, 5);
    std::sort(center.begin(), center.end());
    CHECK(center == std::vector<int>{1, 3, 7, 9});

    auto edge = admissible_moves(g, 2);
    std::sort(edge.begin(), edge.end());
    CHECK(edge == std::vector<int>{4, 6, 8});
}

TEST_CASE("interior cells of a 7x7 grid have all eight moves") {
    const Grid g(7, 7);
    for (int r = 2; r <= 4; ++r)
        for (int c = 2; c <= 4; ++c)
            CHECK(admissible_moves(g, g.cell_at(r, c)).size() == 8);
}

TEST_CASE("moves stay on the grid and are distinct") {
    for (int w : {3, 4, 7})
        for (int h : {3, 5}) {
            const Grid g(w, h);
            for (int cell = 1; cell <= g.cells(); ++cell) {
                const auto moves = admissible_moves(g, cell);
                std::set<int> unique(moves.begin(), moves.end());
                CHECK(unique.size() == moves.size());
                for (int dest : moves) {
                    CHECK(dest >= 1);
                    CHECK(dest <= g.cells());
                    CHECK(dest != cell);
                }
            }
        }
}

TEST_CASE("sonar coverage is monotone non-increasing in the searched mask") {
    const Grid g(5, 5);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> cell_dist(1, g.cells());
    for (int trial = 0; trial < 200; ++trial) {
        CellMask base;
        for (int i = 0; i < trial % 20; ++i) base.set(cell_dist(rng));
        CellMask larger = base;
        larger.set(cell_dist(rng));
        const int ship = cell_dist(rng);
        CHECK(sonar_coverage(g, ship, larger).first <= sonar_coverage(g, ship, base).first);
    }
}

TEST_CASE("sonar and moves commute with the square grid symmetries") {
    for (int n : {3, 4, 5}) {
        const Grid g(n, n);
        for (const auto& sym : square_symmetries(g)) {
            for (int cell = 1; cell <= g.cells(); ++cell) {
                auto mapped_sweep = sonar_cells(g, sym[static_cast<std::size_t>(cell)]);
                auto sweep_mapped = sonar_cells(g, cell);
                for (auto& c : sweep_mapped) c = sym[static_cast<std::size_t>(c)];
                std::sort(mapped_sweep.begin(), mapped_sweep.end());
                std::sort(sweep_mapped.begin(), sweep_mapped.end());
                CHECK(mapped_sweep == sweep_mapped);

                auto mapped_moves = admissible_moves(g, sym[static_cast<std::size_t>(cell)]);
                auto moves_mapped = admissible_moves(g, cell);
                for (auto& c : moves_mapped) c = sym[static_cast<std::size_t>(c)];
                std::sort(mapped_moves.begin(), mapped_moves.end());
                std::sort(moves_mapped.begin(), moves_mapped.end());
                CHECK(mapped_moves == moves_mapped);
            }
        }
    }
}

TEST_CASE("submarine outcome distribution and branch information") {
    const Grid g(3, 3);
    const SubmarineProcess p(g);
    const auto x0 = p.initial_measurement_state();

    // Sweep at edge cell 4 over the empty mask: u = 4 of x = 9.
    const auto d = p.outcome_distribution(0, x0, 4);
    double found_mass = 0.0, not_found = 0.0;
    for (const auto& o : d.outcomes()) {
        if (o.label == kNotFound)
            not_found = o.probability;
        else {
            found_mass += o.probability;
            // Each found branch resolves everything at once: log2(9) bits,
            // the yes-surprisal log2(9/4) plus the log2(4) pinpoint gain.
            CHECK(information_content(o.probability).value ==
                  Approx(std::log2(9.0 / 4.0) + std::log2(4.0)).margin(1e-12));
            CHECK(p.transition(0, x0, 4, o.label).resolved);
        }
    }
    CHECK(found_mass == Approx(4.0 / 9.0));
    CHECK(not_found == Approx(5.0 / 9.0));
}

TEST_CASE("fully searched neighbourhood gives a certain no outcome") {
    const Grid g(3, 3);
    const SubmarineProcess p(g);
    SubmarineMeasState x;
    for (int cell : {1, 2, 4, 5}) x.searched.set(cell);
    // Ship at 1: the whole sweep {1, 2, 4} is already searched.
    const auto d = p.outcome_distribution(0, x, 1);
    REQUIRE(d.size() == 1);
    CHECK(d.outcomes()[0].label == kNotFound);
    CHECK(d.outcomes()[0].probability == Approx(1.0));
    CHECK(entropy(d).value == Approx(0.0).margin(1e-15));
}

TEST_CASE("grid validation") {
    CHECK_THROWS_AS(Grid(1, 5), model_error);
    CHECK_THROWS_AS(Grid(17, 17), resource_error);
    CHECK_NOTHROW(Grid(2, 2));
    CHECK_NOTHROW(Grid(16, 16));
}
