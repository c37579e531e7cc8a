#include <doctest.h>

#include <clocale>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "toda/report.hpp"

using namespace toda;
using namespace toda::report;

TEST_CASE("number formatting") {
    CHECK(num(0.1) == "0.10000000000000001");
    CHECK(num(1.0) == "1");
    CHECK(num(-2.5e-300) == "-2.5e-300");
    CHECK(num(std::nan("")) == "nan");
    CHECK(num(INFINITY) == "inf");
    CHECK(num(-INFINITY) == "-inf");
    CHECK(num(42) == "42");
    // Round trip at 17 digits.
    for (double v : {1.0 / 3, 2.0 / 7e10, 6.02214076e23})
        CHECK(std::stod(num(v)) == v);
}

TEST_CASE("number formatting ignores the global locale") {
    const char* got = std::setlocale(LC_ALL, "de_DE.UTF-8");
    CHECK(num(0.5) == "0.5");
    if (got) std::setlocale(LC_ALL, "C");
}

TEST_CASE("csv layout") {
    CsvTable t({"a", "b"});
    t.add({"1", "2"});
    t.add({"3", "4"});
    CHECK(t.rows() == 2);
    CHECK(t.str() == "a,b\n1,2\n3,4\n");
}

TEST_CASE("series and characteristic tables") {
    const ParamPoint p(Leaf::make({2}), {0.1});
    const auto u = taylor_branch(p, 2);
    const auto t = series_table(powers_table(u, 2, 1.0), 1, 1);
    std::istringstream in(t.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "p,m,re,im,log_scale");
    std::getline(in, line);
    CHECK(line == "1,0,1,0,0");
    CHECK(t.rows() == 6);

    const auto c = char_table(solve_characteristic(p));
    CHECK(c.rows() == 2);
    CHECK(c.str().rfind("x_re,x_im,modulus,lambda_re,lambda_im,kappa_re,kappa_im,simple,fold_ok\n", 0) == 0);
}

TEST_CASE("scan table lists each eigenvalue and marks failures") {
    ScanPoint ok;
    ok.delta = 0.01;
    BlockSpectrum b;
    b.q = 1;
    b.epsilon = 0.002;
    b.L = 4;
    b.mu = RVec(2);
    b.mu << 2, 0.5;
    b.gamma = 0.5;
    b.c_norm = 0.25;
    b.c_hs = 0.3;
    ok.blocks.push_back(b);
    ScanPoint bad;
    bad.delta = 0.001;
    bad.status = "NoDominantOrbit";
    const auto t = scan_table({ok, bad});
    CHECK(t.str() ==
          "delta,epsilon,L,q,k,mu,mu_over_L,gamma,c_norm,c_hs,status\n"
          "0.01,0.002,4,1,1,2,0.5,0.5,0.25,0.29999999999999999,ok\n"
          "0.01,0.002,4,1,2,0.5,0.125,0.5,0.25,0.29999999999999999,ok\n"
          "0.001,nan,nan,nan,nan,nan,nan,nan,nan,nan,NoDominantOrbit\n");
}

TEST_CASE("phase table") {
    PhaseRow r;
    r.b = 0.5;
    r.c_or_gamma = 0.25;
    r.rho_char = 1;
    r.abs_x_plus = 1;
    r.abs_x_minus = 2;
    const auto t = phase_table({r});
    CHECK(t.str() == "b,c_or_gamma,rho_char,|x_plus|,|x_minus|,conjugate_pair,error_code\n"
                     "0.5,0.25,1,1,2,0,\n");
}

TEST_CASE("trajectory table columns follow the leaf") {
    const Leaf l = Leaf::make({3, 6});
    Thresholds th;
    TrajectoryState s;
    s.r = 1;
    s.a = {0.1, 0.01};
    s.moments = {0.9, 0.03, 0.001};
    th.trajectory.push_back(s);
    th.rho_star.push_back(2);
    const auto t = trajectory_table(th, l);
    CHECK(t.str() == "T,r,a_1,a_2,t_0,t_3,t_6,rho_star,univalence_margin\n"
                     "0,1,0.10000000000000001,0.01,0.90000000000000002,0.029999999999999999,0.001,2,0\n");
}

TEST_CASE("git blob hashes") {
    CHECK(git_blob_hash("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_hash("hello\n") == "ce013625030ba8dba906f756967f9e9ca394464a");
}

TEST_CASE("atomic writes") {
    const auto dir = std::filesystem::temp_directory_path() / "toda_report_test";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "out.csv").string();
    write_atomic(path, "x\n1\n");
    write_atomic(path, "x\n2\n");
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == "x\n2\n");
    CHECK(!std::filesystem::exists(path + ".tmp"));
    CHECK_THROWS_AS(write_atomic((dir / "missing" / "out.csv").string(), "x"), Error);
    std::filesystem::remove_all(dir);
}
