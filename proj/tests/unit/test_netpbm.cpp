// Copyright 2026 The dmd Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <string>

#include "dmd/error.hpp"
#include "dmd/netpbm.hpp"
#include "dmd/random.hpp"
#include "test_util.hpp"

namespace dmd::imaging {
namespace {

TEST(Netpbm, DecodesMinimalPgm) {
  const std::string bytes = std::string("P5 2 2 255\n") + '\x00' + '\x80' + '\xff' + '\x33';
  const auto d = decode_netpbm(bytes);
  EXPECT_EQ(d.maxval, 255);
  ASSERT_EQ(d.image.channels(), 1u);
  ASSERT_EQ(d.image.height(), 2u);
  ASSERT_EQ(d.image.width(), 2u);
  EXPECT_EQ(d.image.at(0, 0, 0), 0.0);
  EXPECT_EQ(d.image.at(0, 0, 1), 128.0 / 255.0);
  EXPECT_EQ(d.image.at(0, 1, 0), 1.0);
  EXPECT_EQ(d.image.at(0, 1, 1), 51.0 / 255.0);
}

TEST(Netpbm, SkipsCommentsInHeader) {
  const std::string bytes = std::string("P5\n# a comment\n1 1\n# another\n255\n") + '\x40';
  EXPECT_EQ(decode_netpbm(bytes).image.data()[0], 64.0 / 255.0);
}

TEST(Netpbm, SixteenBitIsBigEndian) {
  const std::string bytes = std::string("P5 1 1 65535\n") + '\x01' + '\x02';
  EXPECT_EQ(decode_netpbm(bytes).image.data()[0], 258.0 / 65535.0);
}

TEST(Netpbm, PpmIsPlanar) {
  const std::string bytes = std::string("P6 2 1 255\n") + std::string("\xff\x00\x00\x00\xff\x00", 6);
  const auto img = decode_netpbm(bytes).image;
  ASSERT_EQ(img.channels(), 3u);
  EXPECT_EQ(img.at(0, 0), 1.0);
  EXPECT_EQ(img.at(1, 0), 0.0);
  EXPECT_EQ(img.at(1, 1), 1.0);
}

TEST(Netpbm, EightBitRoundTripIsExact) {
  Rng rng(1);
  for (std::size_t c : {1u, 3u}) {
    Tensor3 img(c, 5, 7);
    for (double& v : img.data()) v = static_cast<double>(rng.integer(0, 255)) / 255.0;
    const std::string bytes = encode_netpbm(img, 255);
    EXPECT_EQ(decode_netpbm(bytes).image, img);
    EXPECT_EQ(encode_netpbm(decode_netpbm(bytes).image, 255), bytes);
  }
}

TEST(Netpbm, SixteenBitRoundTripCoversEveryLevel) {
  Tensor3 img(1, 256, 256);
  for (std::size_t i = 0; i < img.size(); ++i) {
    img.data()[i] = static_cast<double>(i) / 65535.0;
  }
  const auto d = decode_netpbm(encode_netpbm(img, 65535));
  EXPECT_EQ(d.maxval, 65535);
  EXPECT_EQ(d.image, img);
}

TEST(Netpbm, FileRoundTrip) {
  testing::TempDir dir;
  Tensor3 img(3, 2, 2, 0.2);
  img.at(2, 1, 1) = 1.0;
  save_image(img, dir / "x.ppm");
  int maxval = 0;
  const auto back = load_image(dir / "x.ppm", &maxval);
  EXPECT_EQ(maxval, 255);
  EXPECT_NEAR(back.at(0, 0, 0), 0.2, 0.5 / 255.0);
  EXPECT_EQ(back.at(2, 1, 1), 1.0);
}

TEST(Netpbm, MalformedInputIsIoError) {
  EXPECT_THROW(decode_netpbm("P3 1 1 255\n0"), IoError);
  EXPECT_THROW(decode_netpbm("P5 2 2 255\n\x01\x02"), IoError);
  EXPECT_THROW(decode_netpbm("P5 0 2 255\n"), IoError);
  EXPECT_THROW(decode_netpbm("P5 1 1 70000\n\x01\x02"), IoError);
  EXPECT_THROW(decode_netpbm("P5 1 1 10\n\x20"), IoError);
  EXPECT_THROW(decode_netpbm("P5 x 1 255\n\x20"), IoError);
  EXPECT_THROW(decode_netpbm(""), IoError);
}

TEST(Netpbm, MissingFileIsIoError) {
  testing::TempDir dir;
  EXPECT_THROW(load_image(dir / "absent.pgm"), IoError);
}

TEST(Netpbm, RejectsUnsupportedChannelCounts) {
  EXPECT_THROW(encode_netpbm(Tensor3(2, 1, 1)), ValidationError);
  EXPECT_THROW(encode_netpbm(Tensor3(1, 1, 1), 0), ValidationError);
}

}  // namespace
}  // namespace dmd::imaging
