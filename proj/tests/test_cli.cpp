#include <gtest/gtest.h>

#include <cstdio>
#include <fstream>

#include "json.hpp"
#include "logdiff/cli.hpp"

using logdiff::CommandResult;
using logdiff::run_command;

TEST(Cli, Examples) {
  CommandResult r = run_command({"coeff", "brace", "--p", "2", "--m", "1", "--k", "4", "--i", "2"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "2\n");
  r = run_command({"chart-check", "--map", "[[3]]", "--p", "2"});
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out, "log-etale: true, coker-order: 3\n");
  EXPECT_EQ(run_command({"chart-check", "--map", "[[2]]", "--p", "2"}).out, "log-etale: false, coker-order: 2\n");
  EXPECT_EQ(run_command({"chart-check", "--map", "[[1],[1]]", "--p", "3"}).out,
            "log-etale: false, coker-order: infinite\n");
  r = run_command({"selftest", "--quick"});
  EXPECT_EQ(r.exit_code, 0) << r.out;
  EXPECT_NE(r.out.find("0 failed"), std::string::npos);
}

TEST(Cli, Coefficients) {
  EXPECT_EQ(run_command({"coeff", "angle", "--p", "2", "--m", "1", "--k", "4", "--i", "2"}).out, "3\n");
  EXPECT_EQ(run_command({"coeff", "qfact", "--p", "2", "--m", "1", "--k", "7"}).out, "6\n");
  EXPECT_EQ(run_command({"coeff", "padic", "--p", "2", "--nilpotency", "3", "--alpha", "1/3", "--k", "2", "--reduce"}).out,
            "-1/9 = 7 mod 8\n");
  EXPECT_EQ(run_command({"coeff", "compose", "--p", "2", "--m", "1", "--a", "3", "--b", "3", "--k", "6"}).out,
            "10/3\n");
  EXPECT_EQ(run_command({"coeff", "brace", "--k", "[4,2]", "--i", "[2,1]", "--m", "0"}).out, "12\n");
  EXPECT_EQ(run_command({"coeff", "brace", "--k", "2", "--i", "3"}).exit_code, 1);
  EXPECT_EQ(run_command({"coeff", "brace", "--k", "x", "--i", "3"}).exit_code, 2);
  EXPECT_EQ(run_command({"coeff", "nope"}).exit_code, 2);
}

TEST(Cli, OperatorCommands) {
  EXPECT_EQ(run_command({"mul", "d[1]", "1*x[1]", "--p", "3"}).out, "1*x[1] d[0] + 1*x[1] d[1]\n");
  EXPECT_EQ(run_command({"transpose", "d[1]", "--p", "3"}).out, "8*x[0] d[1]\n");
  EXPECT_EQ(run_command({"transpose", "d[2]", "--p", "3"}).out, "2*x[0] d[1] + 1*x[0] d[2]\n");
  EXPECT_EQ(run_command({"levelmap", "d[4]", "--p", "2", "--nilpotency", "5", "--to", "1"}).out, "12*x[0] d[4]\n");
  EXPECT_EQ(run_command({"rebase", "d[1]", "--matrix", "[[3]]", "--p", "2", "--nilpotency", "3"}).out,
            "3*x[0] d[1]\n");
  EXPECT_EQ(run_command({"act", "d[1]", "5*x[3]", "--p", "7"}).out, "15*x[3]\n");
  EXPECT_EQ(run_command({"omega-act", "1*x[1] * wedge", "d[1]", "--p", "3"}).out, "8*x[1] * wedge\n");
  EXPECT_EQ(run_command({"taylor", "x[1]", "--order", "1", "--p", "3"}).out, "1*x[1] * E[0] + 1*x[1] * E[1]\n");
  EXPECT_EQ(run_command({"mul", "d[1,0]", "d[0,1]", "--rank", "2", "--json"}).out,
            "{\"command\":\"mul\",\"result\":\"1*x[0,0] d[1,1]\"}\n");
}

TEST(Cli, Errors) {
  CommandResult r = run_command({"mul", "d[1", "d[1]"});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("SyntaxError"), std::string::npos);
  r = run_command({"mul", "d[1", "d[1]", "--json"});
  EXPECT_EQ(nlohmann::json::parse(r.out)["error"]["code"], "SyntaxError");
  EXPECT_EQ(run_command({"mul", "d[1]"}).exit_code, 2);
  EXPECT_EQ(run_command({}).exit_code, 2);
  EXPECT_EQ(run_command({"frobnicate"}).exit_code, 2);
  EXPECT_EQ(run_command({"mul", "d[1]", "d[1]", "--p", "4"}).exit_code, 1);
  EXPECT_EQ(run_command({"mul", "d[1]", "d[1]", "--nilpotency", "0"}).exit_code, 1);
  EXPECT_EQ(run_command({"rebase", "d[1]", "--matrix", "[[2]]"}).exit_code, 1);
  EXPECT_EQ(run_command({"chart-check"}).exit_code, 2);
}

TEST(Cli, SessionsAndCharts) {
  const std::string dir = ::testing::TempDir();
  const std::string chart = dir + "logdiff_cli_chart.json";
  {
    std::ofstream out(chart);
    out << R"({"p":2,"nilpotency":3,"level":1,"monoid":{"ambient_rank":1,"generators":[[1]]},)"
        << R"("basis_map":{"matrix":[[3]]},"group_mode":false})";
  }
  EXPECT_EQ(run_command({"act", "d[1]", "x[1]", "--chart", chart}).out, "3*x[1]\n");

  const std::string session = dir + "logdiff_cli_session.json";
  {
    std::ofstream out(session);
    out << R"({"chart":{"p":3,"nilpotency":2,"level":0,"monoid":{"ambient_rank":1,"generators":[[1]]},)"
        << R"("basis_map":{"matrix":[[1]]},"group_mode":false},"bindings":{}})";
  }
  EXPECT_EQ(run_command({"mul", "d[1]", "d[1]", "--session", session, "--bind", "P"}).exit_code, 0);
  EXPECT_EQ(run_command({"transpose", "P", "--session", session}).out,
            run_command({"transpose", "d[1] + d[2]", "--p", "3"}).out);
  EXPECT_EQ(run_command({"act", "P", "x[2]", "--session", session}).out, "4*x[2]\n");
  EXPECT_EQ(run_command({"mul", "d[1]", "d[1]", "--bind", "P"}).exit_code, 2);

  std::ofstream(session) << R"({"chart":{"p":9}})";
  const CommandResult bad = run_command({"transpose", "d[1]", "--session", session});
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_NE(bad.err.find("SchemaError"), std::string::npos);
  std::remove(chart.c_str());
  std::remove(session.c_str());
}

TEST(Cli, ByteStable) {
  const std::vector<std::string> args = {"mul", "(1*x[2,1] + 3*x[0,1]) d[2,1] + x[1,0] d[0,1]", "d[1,1] - 2*x[0,3] d[2,0]",
                                         "--rank", "2", "--p", "5", "--level", "1"};
  const std::string first = run_command(args).out;
  for (int t = 0; t < 5; ++t) EXPECT_EQ(run_command(args).out, first);
  ::setenv("LOGDIFF_SEED", "7", 1);
  const std::string a = run_command({"selftest", "--quick"}).out;
  EXPECT_EQ(run_command({"selftest", "--quick"}).out, a);
  EXPECT_NE(a.find("seed 7"), std::string::npos);
  ::unsetenv("LOGDIFF_SEED");
}
