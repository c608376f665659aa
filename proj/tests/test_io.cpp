#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "qpr/config.hpp"
#include "qpr/csv.hpp"
#include "qpr/pipeline.hpp"
#include "qpr/serialize.hpp"
#include "qpr/snapshot.hpp"

using namespace qpr;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qpr_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Snapshot, RoundTripAndLayout) {
  Snapshot s;
  s.key = "abc";
  s.add("x", {1.0, -2.5, 1e-300});
  s.add("empty", {});
  const auto bytes = encode_snapshot(s);
  ASSERT_GE(bytes.size(), 8u);
  EXPECT_EQ(std::string(bytes.begin(), bytes.begin() + 4), "QPRS");
  EXPECT_EQ(bytes[4], snapshot_version & 0xff);
  EXPECT_EQ(bytes[5], snapshot_version >> 8);
  const Snapshot d = decode_snapshot(bytes);
  EXPECT_EQ(d.key, "abc");
  EXPECT_EQ(d.get("x"), s.get("x"));
  EXPECT_TRUE(d.get("empty").empty());
  EXPECT_THROW(d.get("missing"), Error);
}

TEST(Snapshot, DetectsCorruption) {
  Snapshot s;
  s.key = "k";
  s.add("v", {3.0, 4.0});
  auto bytes = encode_snapshot(s);
  auto flipped = bytes;
  flipped[bytes.size() - 9] ^= 0x01;
  try {
    decode_snapshot(flipped);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::integrity);
  }
  auto truncated = bytes;
  truncated.resize(bytes.size() - 3);
  EXPECT_THROW(decode_snapshot(truncated), Error);
  auto magic = bytes;
  magic[0] = 'X';
  EXPECT_THROW(decode_snapshot(magic), Error);
  bytes.push_back(0);
  EXPECT_THROW(decode_snapshot(bytes), Error);
}

TEST(Serialize, KrausAndChannelRoundTrip) {
  KrausSet k;
  k.n_ch = 3;
  k.p = {-0.1, 0.1};
  k.weight = {0.01, 0.01};
  k.incident = {0.2, 0.8};
  k.p0 = 0.1;
  k.completeness_defect = 1e-9;
  for (int q = 0; q < 2; ++q) k.A.push_back(Eigen::MatrixXcd::Random(3, 2));
  Snapshot s;
  append_kraus(s, k);
  const KrausSet r = kraus_from(decode_snapshot(encode_snapshot(s)));
  EXPECT_EQ(r.p, k.p);
  EXPECT_EQ(r.n_ch, 3u);
  EXPECT_EQ((r.A[1] - k.A[1]).norm(), 0.0);
  const CsvTable t = kraus_table(k);
  EXPECT_EQ(t.header.size(), 3u + 12u);
  EXPECT_EQ(t.rows[1][t.column("im_2_1")], k.A[1](2, 1).imag());

  ChannelPotential pot(make_grid(-8, 8, 16), 2, Basis::qubit);
  pot.set_symmetric(3, 0, 1, 0.25);
  const ChannelPotential back = channel_potential_from(to_snapshot(pot, "x"));
  EXPECT_EQ(back.values, pot.values);
  EXPECT_EQ(back.basis, Basis::qubit);
}

TEST(Csv, ExactRoundTripAndFormat) {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{0.1, 1.0 / 3.0}, {-1e-300, 12345678.9}};
  const std::string text = to_csv(t);
  EXPECT_EQ(text.substr(0, 4), "a,b\n");
  EXPECT_EQ(text.find('\r'), std::string::npos);
  EXPECT_NE(text.find("0.10000000000000001"), std::string::npos);
  const CsvTable back = parse_csv(text);
  EXPECT_EQ(back.rows, t.rows);
  EXPECT_THROW(parse_csv("a,b\n1\n"), Error);
  EXPECT_THROW(t.column("c"), Error);
}

TEST(Config, ParsesAndRejects) {
  const RunConfig c = parse_config(
      "# comment\n[wire]\ntransverse_energy_meV = 15.5 ; trailing\n[scan]\nenergy_min = 16\n"
      "energy_max = 16.4\nenergy_step = 0.2\n[protocol]\nblocks = 16.4:0.02, 17:0.03\n"
      "policy = rotate_every_cycle\n");
  EXPECT_EQ(c.transverse_energy, 15.5);
  EXPECT_EQ(c.scan_energies, (std::vector<double>{16.0, 16.2, 16.4}));
  ASSERT_EQ(c.protocol_blocks.size(), 2u);
  EXPECT_EQ(c.protocol_blocks[1].spread, 0.03);
  EXPECT_EQ(c.policy, PolicyVariant::rotate_every_cycle);
  for (const char* bad : {"[wire]\nunknown = 1\n", "[nosuch]\n", "[wire]\ngrid_n = 1000\n",
                          "[dot]\ngrid_n = 64\ngrid_n = 64\n", "grid_n = 64\n", "[stepper]\ndt = abc\n",
                          "[protocol]\nblocks = 14:0.02\n", "[protocol]\nn_cycles = 20\n"}) {
    try {
      parse_config(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::config) << bad;
    }
  }
}

TEST(Config, EchoIsCanonical) {
  const RunConfig a = default_config();
  RunConfig b = parse_config("");
  EXPECT_EQ(canonical_echo(a), canonical_echo(b));
  b.threads = 8;
  b.output_dir = "elsewhere";
  EXPECT_EQ(canonical_echo(a), canonical_echo(b));
  b.stepper.dt = 2.0;
  EXPECT_NE(canonical_echo(a), canonical_echo(b));
}

TEST(Digest, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

#ifdef QPR_CLI_PATH
namespace {

int run_cli(const std::string& args) {
  const int rc = std::system((std::string(QPR_CLI_PATH) + " " + args + " --quiet > /dev/null 2>&1").c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST(Cli, ExitCodes) {
  const fs::path dir = scratch("cli");
  std::ofstream(dir / "bad.ini") << "[wire]\nbogus = 1\n";
  EXPECT_EQ(run_cli("all --config " + (dir / "bad.ini").string() + " --out " + (dir / "o").string()), 2);
  EXPECT_EQ(run_cli("all --config " + (dir / "missing.ini").string()), 4);
  EXPECT_EQ(run_cli("nosuch"), 2);
  EXPECT_EQ(run_cli("scan --threads 0"), 2);
  std::ofstream(dir / "unconverged.ini") << "[dot]\ngrid_n = 64\nmax_iterations = 1\n";
  EXPECT_EQ(run_cli("dot-solve --config " + (dir / "unconverged.ini").string() + " --out " +
                    (dir / "u").string()),
            3);
  std::ofstream(dir / "file") << "x";
  EXPECT_EQ(run_cli("dot-solve --out " + (dir / "file" / "sub").string()), 4);
}
#endif
