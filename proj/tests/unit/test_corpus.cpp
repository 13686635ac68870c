#include <doctest.h>

#include <fstream>
#include <functional>
#include <random>

#include "fixtures.hpp"
#include "opgram/corpus.hpp"

using namespace opgram;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an opgram::Error");
  return ErrorKind::FormatError;
}

}  // namespace

TEST_CASE("parse_smali maps instruction lines through the opcode table") {
  const char* text =
      ".class public Lcom/example/Foo;\n"
      ".super Ljava/lang/Object;\n"
      "\n"
      "# comment line\n"
      ".method public bar()V\n"
      "    .registers 3\n"
      "    :start\n"
      "    iget-object v0, p0, Lcom/example/Foo;->f:Ljava/lang/Object;\n"
      "    invoke-virtual {v0}, Ljava/lang/Object;->toString()Ljava/lang/String;\n"
      "    move-result-object v1\n"
      ".end method\n";
  auto result = parse_smali(text, OpcodeTable::dalvik());
  REQUIRE(result.methods.size() == 1);
  CHECK(result.methods[0] == MethodSequence{0x54, 0x6E, 0x0C});
  CHECK(result.skipped_instructions == 0);
}

TEST_CASE("parse_smali with no method blocks yields nothing") {
  auto result = parse_smali(".class public La;\n.super Lb;\n", OpcodeTable::dalvik());
  CHECK(result.methods.empty());
}

TEST_CASE("a method of directives and labels is one empty sequence") {
  auto result = parse_smali(".method abstract foo()V\n    .registers 2\n    :label\n.end method\n",
                            OpcodeTable::dalvik());
  REQUIRE(result.methods.size() == 1);
  CHECK(result.methods[0].empty());
}

TEST_CASE("payload blocks contribute no opcodes") {
  const char* text =
      ".method public static baz()V\n"
      "    .registers 1\n"
      "    packed-switch v0, :pswitch_data_0\n"
      "    nop\n"
      "    :pswitch_data_0\n"
      "    .packed-switch 0x1\n"
      "        :pswitch_0\n"
      "        :pswitch_1\n"
      "    .end packed-switch\n"
      "    .array-data 4\n"
      "        0x01\n"
      "        0x7f\n"
      "    .end array-data\n"
      "    return-void\n"
      ".end method\n";
  auto result = parse_smali(text, OpcodeTable::dalvik());
  REQUIRE(result.methods.size() == 1);
  // packed-switch instruction, nop, return-void; payload entries skipped
  CHECK(result.methods[0] == MethodSequence{0x2B, 0x00, 0x0E});
  CHECK(result.skipped_instructions == 0);
}

TEST_CASE("annotation blocks are skipped wherever they appear") {
  const char* text =
      ".annotation system Ldalvik/annotation/MemberClasses;\n"
      "    value = { Lcom/a$b; }\n"
      ".end annotation\n"
      ".method public foo()V\n"
      "    .annotation runtime Lcom/X;\n"
      "        value = 1\n"
      "    .end annotation\n"
      "    nop\n"
      ".end method\n";
  auto result = parse_smali(text, OpcodeTable::dalvik());
  REQUIRE(result.methods.size() == 1);
  CHECK(result.methods[0] == MethodSequence{0x00});
  CHECK(result.skipped_instructions == 0);
}

TEST_CASE("unterminated method block is malformed") {
  CHECK(kind_of([] {
          (void)parse_smali(".method public a()V\n    nop\n", OpcodeTable::dalvik());
        }) == ErrorKind::MalformedSmali);
  CHECK(kind_of([] {
          (void)parse_smali(".method a()V\n.method b()V\n.end method\n", OpcodeTable::dalvik());
        }) == ErrorKind::MalformedSmali);
}

TEST_CASE("unknown mnemonics: strict throws, lenient tallies") {
  const char* text = ".method a()V\n    execute-inline {v0}\n    nop\n.end method\n";
  CHECK(kind_of([&] {
          (void)parse_smali(text, OpcodeTable::dalvik(), SmaliMode::Strict);
        }) == ErrorKind::UnknownMnemonic);

  auto lenient = parse_smali(text, OpcodeTable::dalvik(), SmaliMode::Lenient);
  REQUIRE(lenient.methods.size() == 1);
  CHECK(lenient.methods[0] == MethodSequence{0x00});
  CHECK(lenient.skipped_instructions == 1);
}

TEST_CASE("parse_ops reads hex tokens per line") {
  auto methods = parse_ops("08 54 6e");
  REQUIRE(methods.size() == 1);
  CHECK(methods[0] == MethodSequence{0x08, 0x54, 0x6E});

  CHECK(parse_ops("# comment\n").empty());
  CHECK(parse_ops("").empty());

  CHECK(kind_of([] { (void)parse_ops("08 5g"); }) == ErrorKind::BadHexToken);
  CHECK(kind_of([] { (void)parse_ops("08 5"); }) == ErrorKind::BadHexToken);
  CHECK(kind_of([] { (void)parse_ops("08 5A"); }) == ErrorKind::BadHexToken);
}

TEST_CASE("parse_ops keeps blank interior lines as empty methods") {
  auto methods = parse_ops("08 54\n\n6e\n");
  REQUIRE(methods.size() == 3);
  CHECK(methods[0] == MethodSequence{0x08, 0x54});
  CHECK(methods[1].empty());
  CHECK(methods[2] == MethodSequence{0x6E});
}

TEST_CASE("total parse_ops opcode count equals the hex token count") {
  std::mt19937_64 rng(11);
  const char* hex = "0123456789abcdef";
  for (int round = 0; round < 50; ++round) {
    std::string text;
    std::size_t tokens = 0;
    const std::size_t lines = rng() % 6;
    for (std::size_t l = 0; l < lines; ++l) {
      const std::size_t count = rng() % 8;
      for (std::size_t t = 0; t < count; ++t) {
        unsigned byte = static_cast<unsigned>(rng() & 0xFF);
        text += hex[byte >> 4];
        text += hex[byte & 0x0F];
        text += ' ';
        ++tokens;
      }
      text += '\n';
    }
    std::size_t parsed = 0;
    for (const auto& m : parse_ops(text)) parsed += m.size();
    CHECK(parsed == tokens);
  }
}

TEST_CASE("load_corpus follows manifest order and file extensions") {
  fixtures::TempDir dir("corpus");
  std::ofstream(dir.path() / "one.ops") << "08 54 6e\n";
  std::ofstream(dir.path() / "two.smali")
      << ".method a()V\n    nop\n    return-void\n.end method\n";
  std::ofstream(dir.path() / "manifest.jsonl")
      << "{\"id\": \"b\", \"label\": \"malware\", \"family\": \"f\", \"path\": \"one.ops\"}\n"
      << "{\"id\": \"a\", \"label\": \"benign\", \"path\": \"two.smali\"}\n";

  auto manifest = DatasetManifest::load(dir.path() / "manifest.jsonl");
  auto corpus = load_corpus(manifest, OpcodeTable::dalvik());
  REQUIRE(corpus.size() == 2);
  CHECK(corpus[0].id == "b");
  CHECK(corpus[0].label == Label::Malware);
  CHECK(corpus[0].family == "f");
  CHECK(corpus[0].methods == std::vector<MethodSequence>{{0x08, 0x54, 0x6E}});
  CHECK(corpus[1].id == "a");
  CHECK(corpus[1].methods == std::vector<MethodSequence>{{0x00, 0x0E}});
}

TEST_CASE("load_corpus loads a directory of smali files in sorted order") {
  fixtures::TempDir dir("corpusdir");
  std::filesystem::create_directories(dir.path() / "app");
  std::ofstream(dir.path() / "app" / "B.smali") << ".method a()V\n    return-void\n.end method\n";
  std::ofstream(dir.path() / "app" / "A.smali") << ".method b()V\n    nop\n.end method\n";
  std::ofstream(dir.path() / "manifest.jsonl")
      << "{\"id\": \"x\", \"label\": \"benign\", \"path\": \"app\"}\n";

  auto corpus = load_corpus(DatasetManifest::load(dir.path() / "manifest.jsonl"),
                            OpcodeTable::dalvik());
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].methods == std::vector<MethodSequence>{{0x00}, {0x0E}});
}

TEST_CASE("duplicate manifest ids are rejected") {
  fixtures::TempDir dir("dup");
  std::ofstream(dir.path() / "a.ops") << "01\n";
  std::ofstream(dir.path() / "manifest.jsonl")
      << "{\"id\": \"x\", \"label\": \"benign\", \"path\": \"a.ops\"}\n"
      << "{\"id\": \"x\", \"label\": \"malware\", \"path\": \"a.ops\"}\n";
  CHECK(kind_of([&] { (void)DatasetManifest::load(dir.path() / "manifest.jsonl"); }) ==
        ErrorKind::DuplicateId);

  DatasetManifest manifest;
  manifest.entries.push_back({"same", Label::Benign, std::nullopt, dir.path() / "a.ops"});
  manifest.entries.push_back({"same", Label::Benign, std::nullopt, dir.path() / "a.ops"});
  CHECK(kind_of([&] { (void)load_corpus(manifest, OpcodeTable::dalvik()); }) ==
        ErrorKind::DuplicateId);
}

TEST_CASE("missing app file reports the app id") {
  fixtures::TempDir dir("missing");
  DatasetManifest manifest;
  manifest.entries.push_back({"ghost", Label::Benign, std::nullopt, dir.path() / "nope.ops"});
  try {
    (void)load_corpus(manifest, OpcodeTable::dalvik());
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IoError);
    CHECK(std::string(e.what()).find("ghost") != std::string::npos);
  }
}

TEST_CASE("benign manifest entries cannot carry a family") {
  fixtures::TempDir dir("benfam");
  std::ofstream(dir.path() / "manifest.jsonl")
      << "{\"id\": \"x\", \"label\": \"benign\", \"family\": \"f\", \"path\": \"a.ops\"}\n";
  CHECK(kind_of([&] { (void)DatasetManifest::load(dir.path() / "manifest.jsonl"); }) ==
        ErrorKind::FormatError);
}

TEST_CASE("parallel corpus load matches serial order") {
  fixtures::TempDir dir("par");
  fixtures::SyntheticSpec spec;
  spec.benign_apps = 8;
  spec.malware_apps = 8;
  spec.methods_per_app = 4;
  spec.max_len = 12;
  auto corpus = fixtures::make_synthetic_corpus(spec);
  auto manifest_path = fixtures::write_ops_corpus(dir.path(), corpus);

  auto manifest = DatasetManifest::load(manifest_path);
  auto serial = load_corpus(manifest, OpcodeTable::dalvik(), {SmaliMode::Lenient, 1});
  auto parallel = load_corpus(manifest, OpcodeTable::dalvik(), {SmaliMode::Lenient, 4});
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].id == parallel[i].id);
    CHECK(serial[i].methods == parallel[i].methods);
  }
}
