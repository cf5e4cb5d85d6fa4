#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <random>

#include "pricer/optimizer.hpp"

using namespace pricer;

namespace {

PriceLadder make_ladder(const std::string& id, std::array<std::pair<double, double>, 3> price_demand) {
    // entries given in ascending-discount order (price descending)
    PriceLadder l;
    l.product_id = id;
    for (std::size_t j = 0; j < 3; ++j) {
        l.entries[j].discount_pct = 10.0 * static_cast<double>(j);
        l.entries[j].price = Money::from_inr(price_demand[j].first);
        l.entries[j].projected_demand = price_demand[j].second;
    }
    return l;
}

// the two-product fixture used throughout: per-product (price, demand) triples
std::vector<PriceLadder> fixture_ladders() {
    return {make_ladder("P1", {{{105, 9}, {100, 10}, {95, 12}}}),
            make_ladder("P2", {{{210, 4}, {200, 5}, {190, 6}}})};
}

std::vector<PriceLadder> random_ladders(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> mrp_inr(500, 5000);
    std::uniform_int_distribution<int> disc(1, 12);  // x5 percentage points
    std::uniform_real_distribution<double> demand(0.1, 20.0);
    std::uniform_real_distribution<double> ed(-5.0, 5.0);
    std::vector<PriceLadder> ladders;
    for (int i = 0; i < n; ++i) {
        CatalogEntry e;
        e.product_id = "R" + std::to_string(i);
        e.mrp = Money::from_inr(mrp_inr(rng));
        e.buying_cost = Money{e.mrp.paise / 2};
        e.base_discount_pct = 5.0 * disc(rng);
        ladders.push_back(build_price_ladder(e, demand(rng), ed(rng), 5.0));
    }
    return ladders;
}

}  // namespace

TEST_CASE("lp instance has the Fig.5 layout") {
    auto ladders = fixture_ladders();
    LpInstance inst = build_lp_instance(ladders, 300.0);
    REQUIRE(inst.A.rows() == 3);
    REQUIRE(inst.A.cols() == 6);

    Eigen::MatrixXd A_expect(3, 6);
    A_expect << 1, 1, 1, 0, 0, 0,  //
        0, 0, 0, 1, 1, 1,          //
        105, 100, 95, 210, 200, 190;
    CHECK((inst.A - A_expect).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd b_expect(3);
    b_expect << 1, 1, 300;
    CHECK((inst.b - b_expect).cwiseAbs().maxCoeff() == 0.0);

    Eigen::VectorXd r_expect(6);
    r_expect << 945, 1000, 1140, 840, 1000, 1140;
    CHECK((inst.r - r_expect).cwiseAbs().maxCoeff() == 0.0);

    // every column: one selection 1 plus one price entry
    for (int j = 0; j < 6; ++j) {
        int nonzeros = 0;
        for (int i = 0; i < 3; ++i)
            if (inst.A(i, j) != 0.0) ++nonzeros;
        CHECK(nonzeros == 2);
    }
}

TEST_CASE("budget outside the feasible range is rejected before solving") {
    auto ladders = fixture_ladders();
    CHECK_THROWS_AS(build_lp_instance(ladders, 100.0), DomainError);   // < 95+190
    CHECK_THROWS_AS(build_lp_instance(ladders, 1000.0), DomainError);  // > 105+210
    CHECK_NOTHROW(build_lp_instance(ladders, 285.0));
}

TEST_CASE("brute force fixture: unconstrained optimum enumerated by hand") {
    auto ladders = fixture_ladders();
    auto best = brute_force_optimal(ladders, 0.0, std::numeric_limits<double>::infinity());
    CHECK(best.choice == std::vector<int>{2, 2});  // (95,12) and (190,6)
    CHECK(best.expected_revenue == Catch::Approx(2280.0));
    CHECK(best.total_price.inr() == Catch::Approx(285.0));

    // c=305 within 0.5: feasible sums are {105+200, 95+210}; best revenue 1980
    auto constrained = brute_force_optimal(ladders, 305.0, 0.5);
    CHECK(constrained.choice == std::vector<int>{2, 0});
    CHECK(constrained.expected_revenue == Catch::Approx(1140.0 + 840.0));

    // no pair of entries sums into [301.5, 302.5]
    CHECK_THROWS_AS(brute_force_optimal(ladders, 302.0, 0.5), DomainError);
}

TEST_CASE("brute force n=1 returns the max-revenue entry") {
    std::vector<PriceLadder> one = {make_ladder("P", {{{105, 9}, {100, 12}, {95, 10}}})};
    auto best = brute_force_optimal(one, 0.0, std::numeric_limits<double>::infinity());
    CHECK(best.choice == std::vector<int>{1});
}

TEST_CASE("brute force refuses oversized enumerations") {
    std::mt19937_64 rng(1);
    auto ladders = random_ladders(rng, 13);
    CHECK_THROWS_AS(brute_force_optimal(ladders, 0.0, std::numeric_limits<double>::infinity()),
                    DomainError);
}

TEST_CASE("lp solve on the fixture at c=285 is integral and optimal") {
    auto ladders = fixture_ladders();
    LpInstance inst = build_lp_instance(ladders, 285.0);
    LpSolution sol = solve_lp(inst);
    REQUIRE(sol.status == LpStatus::optimal);
    CHECK(sol.objective == Catch::Approx(2280.0));
    CHECK(sol.n_fractional_products == 0);
    CHECK((inst.A * sol.x - inst.b).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(sol.objective == Catch::Approx(inst.r.dot(sol.x)).epsilon(1e-6));

    PriceAssignment a = round_solution(sol, inst);
    CHECK(a.choice == std::vector<int>{2, 2});
    CHECK(a.expected_revenue == Catch::Approx(2280.0));
}

TEST_CASE("single product at its base price picks the base column") {
    // prices (105, 100, 95): fractional mixes of the outer columns are
    // feasible at c=100 but strictly worse than the base entry here
    std::vector<PriceLadder> one = {make_ladder("P", {{{105, 9}, {100, 12}, {95, 10}}})};
    LpInstance inst = build_lp_instance(one, 100.0);
    LpSolution sol = solve_lp(inst);
    REQUIRE(sol.status == LpStatus::optimal);
    Eigen::VectorXd expect(3);
    expect << 0, 1, 0;
    CHECK((sol.x - expect).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rounding ties prefer base then lower discount") {
    auto ladders = fixture_ladders();
    LpInstance inst = build_lp_instance(ladders, 285.0);
    LpSolution sol;
    sol.status = LpStatus::optimal;
    sol.x = Eigen::VectorXd::Zero(6);

    sol.x << 0.6, 0.4, 0.0, 0.0, 0.5, 0.5;
    PriceAssignment a = round_solution(sol, inst);
    CHECK(a.choice == std::vector<int>{0, 1});  // argmax; tie goes to base

    sol.x << 0.5, 0.0, 0.5, 1.0, 0.0, 0.0;
    a = round_solution(sol, inst);
    CHECK(a.choice[0] == 0);  // {0,2} tie goes to the lower discount
}

TEST_CASE("sweep on a single product finds its best entry") {
    std::vector<PriceLadder> one = {make_ladder("P", {{{105, 9}, {100, 12}, {95, 10}}})};
    SweepResult sweep = sweep_budget(one, 101);
    CHECK(sweep.best.choice == std::vector<int>{1});
    CHECK(sweep.best.expected_revenue == Catch::Approx(1200.0));
}

TEST_CASE("sweep hits the per-product argmax when c* lies on the grid") {
    // c* = 95 + 190 = 285 = c_min, always on an inclusive grid
    auto ladders = fixture_ladders();
    SweepResult sweep = sweep_budget(ladders, 101);
    auto oracle = brute_force_optimal(ladders, 0.0, std::numeric_limits<double>::infinity());
    CHECK(sweep.best.expected_revenue == Catch::Approx(oracle.expected_revenue));
    // and the sweep max dominates each individual step
    for (const auto& row : sweep.table)
        CHECK(sweep.best.expected_revenue >= row.rounded_revenue - 1e-9);
}

TEST_CASE("lp relaxation dominance, structure and determinism on random instances") {
    std::mt19937_64 rng(20240811);
    std::uniform_int_distribution<int> n_products(1, 8);
    std::uniform_int_distribution<int> entry(0, 2);
    int checked = 0;
    for (int rep = 0; rep < 220; ++rep) {
        auto ladders = random_ladders(rng, n_products(rng));
        // budget = the price sum of a random integral selection, so the
        // equality-budget integer program is non-vacuously feasible
        Money c_money{0};
        for (const auto& l : ladders)
            c_money = c_money + l.entries[static_cast<std::size_t>(entry(rng))].price;
        double c = c_money.inr();

        LpInstance inst = build_lp_instance(ladders, c);
        LpSolution sol = solve_lp(inst);
        REQUIRE(sol.status == LpStatus::optimal);

        // invariants of an optimal solution
        CHECK((inst.A * sol.x - inst.b).cwiseAbs().maxCoeff() < 1e-6);
        CHECK(sol.x.minCoeff() > -1e-9);
        CHECK(sol.x.maxCoeff() < 1.0 + 1e-9);
        for (int i = 0; i < inst.n; ++i)
            CHECK(sol.x.segment(3 * i, 3).sum() == Catch::Approx(1.0).margin(1e-6));
        CHECK(sol.n_fractional_products <= 1);

        // relaxation dominates the exact-budget integer optimum
        auto ip = brute_force_optimal(ladders, c, 1e-6);
        CHECK(sol.objective >= ip.expected_revenue - 1e-9);

        // determinism: an identical instance solves identically
        LpSolution sol2 = solve_lp(inst);
        CHECK(sol.objective == sol2.objective);
        CHECK((sol.x - sol2.x).cwiseAbs().maxCoeff() == 0.0);
        ++checked;
    }
    CHECK(checked >= 200);
}

TEST_CASE("sweep csv and assignment csv round out the interfaces") {
    auto ladders = fixture_ladders();
    SweepResult sweep = sweep_budget(ladders, 11);
    std::string dir = "test_out_optimizer";
    std::filesystem::create_directories(dir);
    save_sweep_table(sweep.table, dir + "/sweep.csv");
    save_assignment(sweep.best, ladders, dir + "/assignment.csv");
    auto t = csv::read_file(dir + "/sweep.csv");
    CHECK(t.header == std::vector<std::string>{"c", "lp_objective", "rounded_revenue",
                                               "budget_residual", "n_fractional"});
    CHECK(t.rows.size() == sweep.table.size());
    auto a = csv::read_file(dir + "/assignment.csv");
    CHECK(a.rows.size() == 2);
    std::filesystem::remove_all(dir);
}
