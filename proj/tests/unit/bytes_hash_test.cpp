#include <gtest/gtest.h>

#include "tklu/bytes.hpp"
#include "tklu/errors.hpp"
#include "tklu/hash.hpp"

using namespace tklu;

TEST(Hash, KnownSha256Vector) {
  // SHA-256("abc"), split as label "ab" + payload "c".
  const Bytes c{'c'};
  EXPECT_EQ(to_hex(hash_tag("ab", c)), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(to_hex(hash_tag("", Bytes{})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Hash, DeterministicAndSeparated) {
  const Bytes p{1, 2, 3};
  EXPECT_EQ(hash_tag("PW", p), hash_tag("PW", p));
  EXPECT_NE(hash_tag("PW", p), hash_tag("PATH", p));
  Bytes q = p;
  q[2] ^= 1;
  EXPECT_NE(hash_tag("PW", p), hash_tag("PW", q));
}

TEST(Hash, TagComparison) {
  const auto a = hash_tag("A", Bytes{});
  auto b = a;
  EXPECT_TRUE(tags_equal(a, b));
  b[31] ^= 0x80;
  EXPECT_FALSE(tags_equal(a, b));
}

TEST(Bytes, WriterReaderRoundTrip) {
  ByteWriter w;
  w.u8(0xab);
  w.u16(0x1234);
  w.u32(0xdeadbeef);
  w.uint_fixed(0x010203, 5);
  const Bytes out = std::move(w).take();
  EXPECT_EQ(to_hex(out), "ab1234deadbeef0000010203");
  ByteReader r(out);
  EXPECT_EQ(r.u8(), 0xab);
  EXPECT_EQ(r.u16(), 0x1234);
  EXPECT_EQ(r.u32(), 0xdeadbeefu);
  EXPECT_EQ(r.uint_fixed(5), 0x010203u);
  EXPECT_NO_THROW(r.expect_end());
}

TEST(Bytes, ShortReadsAreDecodeErrors) {
  const Bytes three{1, 2, 3};
  ByteReader r(three);
  try {
    r.u32();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DecodeError);
  }
  ByteReader r2(three);
  r2.u8();
  EXPECT_THROW(r2.expect_end(), Error);
}
