#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ddc/csv.hpp"
#include "ddc/errors.hpp"
#include "ddc/pipeline.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

std::string scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "ddc_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("config files parse, override, and reject unknown keys") {
    const std::string dir = scratch_dir("config");
    {
        std::ofstream out(dir + "/good.txt");
        out << "# chain setup\n"
            << "chain_length = 4\n"
            << "spring_k=0.2\n"
            << "bounds = analytic\n"
            << "seed = 9\n";
    }
    ddc::PipelineConfig cfg = ddc::load_config(dir + "/good.txt");
    CHECK(cfg.chain_length == 4);
    CHECK(cfg.spring_k == 0.2);
    CHECK(cfg.bounds == ddc::BoundMode::analytic);
    CHECK(cfg.seed == 9);

    ddc::set_config_key(cfg, "v_r", "25");
    CHECK(cfg.v_r == 25.0);
    CHECK_THROWS_AS(ddc::set_config_key(cfg, "no_such_key", "1"), ddc::InvalidParameter);

    {
        std::ofstream out(dir + "/bad.txt");
        out << "chain_length 4\n";
    }
    CHECK_THROWS_AS(ddc::load_config(dir + "/bad.txt"), ddc::InvalidParameter);

    ddc::PipelineConfig invalid;
    invalid.ts = 0.0;
    CHECK_THROWS_AS(invalid.validate(), ddc::InvalidParameter);

    ddc::PipelineConfig negative_margin;
    negative_margin.epsilon_margin = -1.0;
    CHECK_THROWS_AS(negative_margin.validate(), ddc::InvalidParameter);

    ddc::PipelineConfig deflating;
    deflating.safety_factor = 0.5;
    CHECK_THROWS_AS(deflating.validate(), ddc::InvalidParameter);
}

TEST_CASE("matrix csv round-trips exactly") {
    const std::string dir = scratch_dir("csv");
    const ddc::Matrix m = ddc::Matrix::from_rows(
        {{1.0 / 3.0, -2.718281828459045, 0.0}, {5e-17, 49.99999999999999, -1e12}});
    ddc::write_matrix_csv(dir + "/m.csv", m);
    const ddc::Matrix back = ddc::read_matrix_csv(dir + "/m.csv");
    REQUIRE(back.rows() == 2);
    REQUIRE(back.cols() == 3);
    CHECK((m - back).max_abs() == 0.0);
}

TEST_CASE("flagship pipeline run succeeds and writes its artifacts") {
    ddc::PipelineConfig cfg = fixtures::certified_chain().config;
    cfg.out_dir = scratch_dir("flagship");
    cfg.duration = 8.0;

    std::ostringstream log;
    const int code = ddc::cmd_pipeline(cfg, log);
    CHECK(code == ddc::exit_ok);

    for (std::size_t i = 1; i <= 5; ++i) {
        CHECK(fs::exists(cfg.out_dir + "/data_" + std::to_string(i) + "_U.csv"));
        CHECK(fs::exists(cfg.out_dir + "/cert_" + std::to_string(i) + "_K.csv"));
    }
    CHECK(fs::exists(cfg.out_dir + "/trace.csv"));

    const std::string report = slurp(cfg.out_dir + "/report.txt");
    CHECK(report.find("subsystem 5") != std::string::npos);
    CHECK(report.find("spectral_radius") != std::string::npos);
    CHECK(report.find("status=feasible") != std::string::npos);

    // The individual verbs accept the artifacts the pipeline wrote.
    std::ostringstream verify_log;
    CHECK(ddc::cmd_verify(cfg, verify_log) == ddc::exit_ok);
    std::ostringstream sim_log;
    CHECK(ddc::cmd_simulate(cfg, sim_log) == ddc::exit_ok);
}

TEST_CASE("pipeline reports rank failure when T is too small") {
    ddc::PipelineConfig cfg;
    cfg.samples = 5;
    cfg.max_retries = 2;
    cfg.out_dir = scratch_dir("tiny_t");
    std::ostringstream log;
    CHECK(ddc::cmd_pipeline(cfg, log) == ddc::exit_rank_failure);
    CHECK(log.str().find("rank") != std::string::npos);
}

TEST_CASE("decoupled chain flows through the pipeline") {
    ddc::PipelineConfig cfg;
    cfg.spring_k = 0.0;
    cfg.chain_length = 2;
    cfg.duration = 6.0;
    cfg.out_dir = scratch_dir("decoupled");
    std::ostringstream log;
    CHECK(ddc::cmd_pipeline(cfg, log) == ddc::exit_ok);
}

TEST_CASE("collect then synthesize covers the split workflow") {
    ddc::PipelineConfig cfg = fixtures::certified_chain().config;
    cfg.out_dir = scratch_dir("split");

    std::ostringstream log;
    REQUIRE(ddc::cmd_collect(cfg, log) == ddc::exit_ok);
    REQUIRE(ddc::cmd_synthesize(cfg, log) == ddc::exit_ok);
    CHECK(ddc::cmd_simulate(cfg, log) == ddc::exit_ok);
    CHECK(ddc::cmd_verify(cfg, log) == ddc::exit_ok);
}

TEST_CASE("identical configurations produce byte-identical artifacts") {
    ddc::PipelineConfig cfg;
    cfg.seed = 21;
    cfg.duration = 4.0;
    cfg.jobs = 2;

    std::vector<std::string> dirs{scratch_dir("det_a"), scratch_dir("det_b")};
    for (const std::string& dir : dirs) {
        ddc::PipelineConfig run = cfg;
        run.out_dir = dir;
        std::ostringstream log;
        REQUIRE(ddc::cmd_pipeline(run, log) == ddc::exit_ok);
    }

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const std::string name = entry.path().filename().string();
        CHECK(slurp(dirs[0] + "/" + name) == slurp(dirs[1] + "/" + name));
        ++compared;
    }
    CHECK(compared > 0);
}
