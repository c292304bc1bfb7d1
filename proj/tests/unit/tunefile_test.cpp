#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace holetune;
using namespace holetune::testing;

namespace {

const ContextString kFirst = {"top/1"};
const ContextString kSecond = {"top/2"};

template <class E>
std::string messageOf(const std::string &text, const ExpansionInput &input) {
  try {
    parseTuneFile(text, input);
  } catch (const E &e) {
    return e.what();
  }
  return "no exception";
}

} // namespace

TEST(TuneFile, Format) {
  ProgramModel m = loadModel("map");
  ExpansionInput in = m.expansionInput();
  Assignment a = defaultAssignment(in);
  EXPECT_EQ(a.size(), 2u);
  a[{1, kSecond}] = 1;
  EXPECT_EQ(formatTuneFile(a, in),
            "# holetune v1\npar;top/1;false\npar;top/2;true\n");
}

TEST(TuneFile, GlobalHolesUseTheEmptyContext) {
  ProgramModel m = loadModel("sort");
  ExpansionInput in = m.expansionInput();
  EXPECT_EQ(formatTuneFile(defaultAssignment(in), in),
            "# holetune v1\nthreshold;-;10\n");
  auto c = parseTuneFile("# holetune v1\nthreshold;-;250\n", in);
  EXPECT_EQ(c.assignment.at({1, {}}), 250);
  EXPECT_TRUE(c.warnings.empty());
}

TEST(TuneFileProperty, RoundTrip) {
  Rng rng(81);
  for (const char *name : {"knn", "map", "sort", "calls", "countdown"}) {
    ProgramModel m = loadModel(name);
    ExpansionInput in = m.expansionInput();
    for (int i = 0; i < 20; ++i) {
      Assignment a = randomAssignment(in, rng);
      auto back = parseTuneFile(formatTuneFile(a, in), in);
      EXPECT_EQ(back.assignment, a) << name;
      EXPECT_TRUE(back.warnings.empty());
    }
  }
  ProgramModel m = loadModel("knn");
  Assignment a = randomAssignment(m.expansionInput(), rng);
  std::string path = tempPath("roundtrip.tune");
  writeTuneFile(a, m.expansionInput(), path);
  EXPECT_EQ(readTuneFile(path, m.expansionInput()).assignment, a);
  std::remove(path.c_str());
}

TEST(TuneFile, CommentsAndBlankLinesAreSkipped) {
  ProgramModel m = loadModel("map");
  auto c = parseTuneFile(
      "# holetune v1\n\n# tuned on 30\n  par;top/2;true  \npar;top/1;false\n",
      m.expansionInput());
  EXPECT_EQ(c.assignment.at({1, kSecond}), 1);
  EXPECT_EQ(c.assignment.at({1, kFirst}), 0);
}

TEST(TuneFile, UnknownNamesAndContextsNameTheLine) {
  ProgramModel m = loadModel("map");
  ExpansionInput in = m.expansionInput();
  std::string msg = messageOf<UnknownHole>(
      "# holetune v1\npar;top/1;true\nthreshold;-;3\n", in);
  EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  EXPECT_NE(msg.find("threshold"), std::string::npos) << msg;
  msg = messageOf<UnknownHole>("# holetune v1\npar;top/7;true\n", in);
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
  EXPECT_NE(msg.find("top/7"), std::string::npos) << msg;
  EXPECT_THROW(parseTuneFile("# holetune v1\npar;-;true\n", in), UnknownHole);
}

TEST(TuneFile, Malformed) {
  ProgramModel map = loadModel("map");
  ProgramModel sort = loadModel("sort");
  for (const char *bad :
       {"", "par;top/1;true\n", "# holetune v2\n",
        "# holetune v1\npar;top/1\n", "# holetune v1\npar;top/1;true;x\n",
        "# holetune v1\npar;top/1;yes\n", "# holetune v1\npar;top/1;1\n",
        "# holetune v1\npar;top/1;true\npar;top/1;false\n"})
    EXPECT_THROW(parseTuneFile(bad, map.expansionInput()), MalformedTuneFile)
        << bad;
  for (const char *bad : {"# holetune v1\nthreshold;-;true\n",
                          "# holetune v1\nthreshold;-;12x\n",
                          "# holetune v1\nthreshold;-;\n"})
    EXPECT_THROW(parseTuneFile(bad, sort.expansionInput()), MalformedTuneFile)
        << bad;
}

TEST(TuneFile, MissingPairsGetDefaultsWithWarnings) {
  ProgramModel m = loadModel("map");
  auto c = parseTuneFile("# holetune v1\npar;top/2;true\n", m.expansionInput());
  EXPECT_EQ(c.assignment.at({1, kFirst}), 0);
  EXPECT_EQ(c.assignment.at({1, kSecond}), 1);
  ASSERT_EQ(c.warnings.size(), 1u);
  EXPECT_NE(c.warnings[0].find("par;top/1"), std::string::npos);
  auto empty = parseTuneFile("# holetune v1\n", m.expansionInput());
  EXPECT_EQ(empty.assignment, defaultAssignment(m.expansionInput()));
  EXPECT_EQ(empty.warnings.size(), 2u);
}

TEST(TuneFile, UnreadableFile) {
  ProgramModel m = loadModel("map");
  EXPECT_THROW(readTuneFile(tempPath("absent.tune"), m.expansionInput()),
               Error);
}
