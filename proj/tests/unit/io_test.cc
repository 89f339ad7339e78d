// Copyright 2026 The qconv Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qconv/io.hpp"

#include <filesystem>

#include "gtest/gtest.h"

using namespace qconv;

TEST(TensorJson, Parses) {
    const auto t = parse_tensor_json(R"({"shape":[1,2,2,1],"data":[1,2,3,4.5]})");
    EXPECT_EQ(t.shape, (std::vector<std::size_t>{1, 2, 2, 1}));
    EXPECT_EQ(t.data, (std::vector<double>{1, 2, 3, 4.5}));
    const auto x = to_input_batch(t);
    EXPECT_EQ(x(0, 1, 1, 0), 4.5);
}

TEST(TensorJson, Errors) {
    EXPECT_THROW(parse_tensor_json("{"), ParseError);
    EXPECT_THROW(parse_tensor_json(R"({"shape":[2]})"), ParseError);
    EXPECT_THROW(parse_tensor_json(R"({"shape":[2],"data":[1]})"), ParseError);
    EXPECT_THROW(parse_tensor_json(R"({"shape":[2],"data":["a","b"]})"), ParseError);
    EXPECT_THROW(to_kernel_bank(parse_tensor_json(R"({"shape":[2],"data":[1,2]})")), ShapeError);
}

TEST(TensorCsv, Parses) {
    const auto t = parse_tensor_csv("shape,2,1,2,1\n1, 2\r\n-3,4e-1\n");
    EXPECT_EQ(t.shape, (std::vector<std::size_t>{2, 1, 2, 1}));
    EXPECT_EQ(t.data, (std::vector<double>{1, 2, -3, 0.4}));
}

TEST(TensorCsv, Errors) {
    EXPECT_THROW(parse_tensor_csv(""), ParseError);
    EXPECT_THROW(parse_tensor_csv("dims,1,1\n1\n"), ParseError);
    EXPECT_THROW(parse_tensor_csv("shape,2,2\n1,2\n"), ParseError);
    EXPECT_THROW(parse_tensor_csv("shape,1,2\n1\n"), ParseError);
    EXPECT_THROW(parse_tensor_csv("shape,1,2\n1,x\n"), ParseError);
    EXPECT_THROW(parse_tensor_csv("shape,1.5,2\n1,2\n"), ParseError);
}

TEST(TensorCsv, RoundTripsThroughWriter) {
    RawTensor t{{2, 1, 1, 3}, {0.1, -2, 3e10, 4, 5, 6.25}};
    const auto back = parse_tensor_csv(tensor_to_csv(t));
    EXPECT_EQ(back.shape, t.shape);
    EXPECT_EQ(back.data, t.data);
}

TEST(Files, ReadByExtensionAndMissing) {
    const auto dir = std::filesystem::temp_directory_path() / "qconv_io_test";
    std::filesystem::create_directories(dir);
    write_text_file(dir / "x.csv", "shape,1,1,1,2\n3,4\n");
    write_text_file(dir / "x.json", R"({"shape":[1,1,1,2],"data":[3,4]})");
    EXPECT_EQ(read_tensor_file(dir / "x.csv").data, read_tensor_file(dir / "x.json").data);
    EXPECT_THROW(read_tensor_file(dir / "missing.json"), IoError);
    write_text_file(dir / "bad.json", "[1,");
    EXPECT_THROW(read_tensor_file(dir / "bad.json"), ParseError);
    std::filesystem::remove_all(dir);
}

TEST(SparseJson, RoundTrip) {
    const auto shape = ConvShape::make(1, 3, 3, 1, 2, 2, 1);
    const auto kt = build_dbt_kernel(KernelBank({2, 2, 1, 1}, {1, 2, 3, 4}), shape);
    const auto j = sparse_to_json(kt);
    EXPECT_EQ(j["rows"], 4);
    EXPECT_EQ(j["cols"], 9);
    EXPECT_EQ(j["entries"].size(), 16u);
    EXPECT_EQ(j["entries"][0], nlohmann::json::parse("[0,0,1.0]"));
    const auto back = sparse_from_json(nlohmann::json::parse(j.dump()));
    ASSERT_EQ(back.nnz(), kt.nnz());
    for (std::size_t r = 0; r < 4; ++r) EXPECT_EQ(back.dense_row(r), kt.dense_row(r));
}

TEST(ResultJson, HasExpectedFields) {
    InputBatch x({1, 3, 3, 1}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
    KernelBank k({2, 2, 1, 1}, {1, 2, 3, 4});
    QConvConfig cfg(infer_shape(x, k));
    cfg.plan = ShotPlan::sampled(20, 4);
    const auto j = result_to_json(qconvolve(x, k, cfg), cfg);
    for (const char* key : {"config", "estimated", "exact", "std_error", "max_abs_error", "resources"})
        EXPECT_TRUE(j.contains(key)) << key;
    EXPECT_EQ(j["config"]["generator"], "mt19937_64");
}
