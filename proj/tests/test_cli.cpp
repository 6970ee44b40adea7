#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct Command {
  int exit_code = -1;
  std::string output;  // stdout only
};

Command run(const std::string& args) {
  const std::string out_path = (fs::temp_directory_path() / "pennet_cli_stdout.txt").string();
  const std::string command = std::string(PENNET_CLI) + " " + args + " > " + out_path + " 2>/dev/null";
  const int status = std::system(command.c_str());
  Command result;
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(out_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  result.output = buffer.str();
  std::remove(out_path.c_str());
  return result;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

const std::string kGold = std::string(PENNET_DATA_DIR) + "/ecoli15_gold.tsv";

struct Workdir {
  fs::path dir;
  Workdir() : dir(fs::temp_directory_path() / "pennet_cli_test") {
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("help lists every subcommand and knob defaults") {
  const Command top = run("--help");
  CHECK(top.exit_code == 0);
  for (const char* name : {"simulate", "infer", "eval", "bench"})
    CHECK(top.output.find(name) != std::string::npos);

  const Command infer = run("infer --help");
  CHECK(infer.exit_code == 0);
  for (const char* flag : {"--expr", "--method", "--lambda", "--cv-folds", "--cv-grid", "--cv-min-ratio",
                           "--groups-k", "--fused-k", "--linkage", "--permutations", "--alpha",
                           "--edge-quantile", "--symmetrize", "--threads", "--seed", "--tol", "--max-iter"})
    CHECK(infer.output.find(flag) != std::string::npos);
}

TEST_CASE("usage errors exit 1, data errors exit 2") {
  CHECK(run("--frobnicate").exit_code == 1);
  CHECK(run("infer").exit_code == 1);                       // missing required flags
  CHECK(run("unknowncommand").exit_code == 1);
  Workdir work;
  CHECK(run("simulate --gold /does/not/exist.tsv --out " + work.path("x.tsv")).exit_code == 2);
  CHECK(run("infer --expr /does/not/exist.tsv --out " + work.path("y.tsv")).exit_code == 2);
}

TEST_CASE("simulate, infer and eval chain end to end") {
  Workdir work;
  const std::string expr = work.path("expr.tsv");
  const std::string net = work.path("net.tsv");

  const Command sim = run("simulate --gold " + kGold + " --n 100 --seed 7 --out " + expr);
  REQUIRE(sim.exit_code == 0);
  std::ifstream in(expr);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 101);  // header plus one row per sample

  const Command infer = run("infer --expr " + expr + " --method lasso --seed 1 --threads 4 --out " + net);
  REQUIRE(infer.exit_code == 0);

  const Command eval = run("eval --pred " + net + " --gold " + kGold + " --edge-quantile 0.8857");
  REQUIRE(eval.exit_code == 0);
  CHECK(eval.output.rfind("method\tTrue\tPred\tTP\tFP\tTN\tFN\tMCC\tTPR\tFPR\tACC\tTime[sec]\n", 0) == 0);
  CHECK(eval.output.find("\t13\t") != std::string::npos);  // True = 13

  SUBCASE("binarized inference with symmetrization") {
    const std::string edges = work.path("edges.tsv");
    const Command binary = run("infer --expr " + expr + " --method lasso --seed 1 --edge-quantile 0.9 " +
                               "--symmetrize or --out " + edges);
    REQUIRE(binary.exit_code == 0);
    const Command scored = run("eval --pred " + edges + " --gold " + kGold);
    CHECK(scored.exit_code == 0);
  }
}

TEST_CASE("eval reports the first unknown gene and exits 2") {
  Workdir work;
  const std::string pred = work.path("pred.tsv");
  {
    std::ofstream out(pred);
    out << "crp\tnotagene\n";
  }
  const std::string err_path = work.path("err.txt");
  const std::string command = std::string(PENNET_CLI) + " eval --pred " + pred + " --gold " + kGold +
                              " 2> " + err_path + " > /dev/null";
  const int status = std::system(command.c_str());
  CHECK(WEXITSTATUS(status) == 2);
  CHECK(slurp(err_path).find("notagene") != std::string::npos);
}

TEST_CASE("identical seeds produce byte-identical networks") {
  Workdir work;
  const std::string expr = work.path("expr.tsv");
  REQUIRE(run("simulate --gold " + kGold + " --n 60 --seed 3 --out " + expr).exit_code == 0);
  const std::string a = work.path("a.tsv"), b = work.path("b.tsv");
  REQUIRE(run("infer --expr " + expr + " --method enet --seed 9 --threads 1 --out " + a).exit_code == 0);
  REQUIRE(run("infer --expr " + expr + " --method enet --seed 9 --threads 8 --out " + b).exit_code == 0);
  CHECK(slurp(a) == slurp(b));
  CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("paired method needs an explicit lambda") {
  Workdir work;
  const std::string expr = work.path("expr.tsv");
  REQUIRE(run("simulate --gold " + kGold + " --n 40 --seed 2 --out " + expr).exit_code == 0);
  CHECK(run("infer --expr " + expr + " --method paired --out " + work.path("p.tsv")).exit_code == 2);
  CHECK(run("infer --expr " + expr + " --method paired --lambda 0.4 --out " + work.path("p.tsv")).exit_code == 0);
}

TEST_CASE("config files supply defaults, flags win") {
  Workdir work;
  const std::string expr = work.path("expr.tsv");
  REQUIRE(run("simulate --gold " + kGold + " --n 50 --seed 5 --out " + expr).exit_code == 0);

  const std::string config = work.path("run.conf");
  {
    std::ofstream out(config);
    out << "# inference settings\n";
    out << "method=lasso\n";
    out << "seed=11\n";
    out << "threads=2\n";
  }
  const std::string from_config = work.path("c.tsv");
  REQUIRE(run("infer --expr " + expr + " --config " + config + " --out " + from_config).exit_code == 0);
  const std::string from_flags = work.path("f.tsv");
  REQUIRE(run("infer --expr " + expr + " --method lasso --seed 11 --out " + from_flags).exit_code == 0);
  CHECK(slurp(from_config) == slurp(from_flags));

  // An explicit flag overrides the config value.
  const std::string overridden = work.path("o.tsv");
  REQUIRE(run("infer --expr " + expr + " --config " + config + " --method ridge --out " + overridden)
              .exit_code == 0);
  CHECK(slurp(overridden) != slurp(from_config));
}

TEST_CASE("bench writes the table with one row per size and method") {
  Workdir work;
  const std::string results = work.path("results.tsv");
  const Command bench = run("bench --sizes 15 --methods lasso,ridge --seed 1 --n 40 --template " + kGold +
                            " --threads 4 --out " + results);
  REQUIRE(bench.exit_code == 0);
  const std::string text = slurp(results);
  CHECK(text.rfind("method\tTrue\tPred", 0) == 0);
  CHECK(text.find("\nlasso\t") != std::string::npos);
  CHECK(text.find("\nridge\t") != std::string::npos);
  int data_rows = 0;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line.rfind("method\t", 0) != 0) ++data_rows;
  CHECK(data_rows == 2);
}

TEST_CASE("transposed expression files load through the flag") {
  Workdir work;
  const std::string expr = work.path("wide.tsv");
  {
    std::ofstream out(expr);
    out << "g1\tg2\tg3\n";
    out << "1.0\t2.0\t3.0\t4.0\n";   // gene g1 across 4 samples
    out << "0.5\t1.5\t2.5\t3.5\n";
    out << "4.0\t3.0\t2.0\t1.0\n";
  }
  // Four samples cannot cross-validate; a fixed lambda skips it.
  const Command inferred =
      run("infer --expr " + expr + " --transpose --method lasso --lambda 0.2 --out " + work.path("n.tsv"));
  CHECK(inferred.exit_code == 0);
  // Without the flag the block is ragged relative to the header.
  CHECK(run("infer --expr " + expr + " --method lasso --lambda 0.2 --out " + work.path("m.tsv")).exit_code == 2);
}
