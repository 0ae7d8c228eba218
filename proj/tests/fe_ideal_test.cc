/*
 * Copyright 2026 The SFedV Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "sfedv/fe_ideal.h"

#include <cstring>

#include "gtest/gtest.h"
#include "sfedv/tensor.h"
#include "test_util.h"

namespace sfedv::fe {
namespace {

using ::sfedv::testing::ValueOrDie;

template <typename T>
concept ExposesPayload = requires(const T& t) { t.payload(); } ||
                         requires(const T& t) { t.payload_; } ||
                         requires(const T& t) { t.plaintext(); };

static_assert(!ExposesPayload<Ciphertext>);

SparseFunctionVector Single(uint64_t length, uint64_t row, uint64_t col,
                            int64_t value) {
  return ValueOrDie(SparseFunctionVector::Create(
      length * length, {{ValueOrDie(KronFlat(row, col, length)), value}}));
}

TEST(SetupTest, KeysAndFreshIds) {
  SetupResult a = ValueOrDie(fe::Setup(2, {1, 1}));
  EXPECT_EQ(a.encryption_keys.size(), 2u);
  EXPECT_EQ(a.instance.input_length(), 2u);
  SetupResult b = ValueOrDie(fe::Setup(2, {1, 1}));
  EXPECT_NE(a.instance.id(), b.instance.id());
  EXPECT_EQ(ValueOrDie(fe::Setup(4, {2, 2, 2, 2})).encryption_keys.size(), 4u);
}

TEST(SetupTest, RejectsBadShapes) {
  EXPECT_FALSE(fe::Setup(1, {1}).ok());
  EXPECT_FALSE(fe::Setup(2, {1}).ok());
  EXPECT_FALSE(fe::Setup(2, {1, 0}).ok());
}

TEST(DecryptTest, SingleProduct) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  std::vector<Ciphertext> cts = {
      ValueOrDie(Encrypt(setup.encryption_keys[0], Tag{}, std::vector<int64_t>{5})),
      ValueOrDie(Encrypt(setup.encryption_keys[1], Tag{}, std::vector<int64_t>{3}))};
  SecretKey key = ValueOrDie(KeyGen(setup.instance, Tag{}, Single(2, 0, 1, 1)));
  EXPECT_EQ(ValueOrDie(Decrypt(cts, key)), 15);
  // Slot order in the presented set does not matter.
  std::swap(cts[0], cts[1]);
  EXPECT_EQ(ValueOrDie(Decrypt(cts, key)), 15);
}

TEST(EncryptTest, WrongLength) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {2, 1}));
  EXPECT_FALSE(
      Encrypt(setup.encryption_keys[0], Tag{}, std::vector<int64_t>{1}).ok());
}

TEST(EncryptTest, PublicFields) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  Ciphertext ct = ValueOrDie(
      Encrypt(setup.encryption_keys[1], Tag{9}, std::vector<int64_t>{4}));
  EXPECT_EQ(ct.instance_id(), setup.instance.id());
  EXPECT_EQ(ct.slot(), 1u);
  EXPECT_EQ(ct.tag(), Tag{9});
  EXPECT_EQ(ct.length(), 1u);
}

TEST(DecryptTest, FunctionalityIsDeterministic) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  const std::vector<int64_t> a = {6};
  const std::vector<int64_t> b = {-2};
  std::vector<Ciphertext> first = {
      ValueOrDie(Encrypt(setup.encryption_keys[0], Tag{}, a)),
      ValueOrDie(Encrypt(setup.encryption_keys[1], Tag{}, b))};
  std::vector<Ciphertext> second = {
      ValueOrDie(Encrypt(setup.encryption_keys[0], Tag{}, a)),
      ValueOrDie(Encrypt(setup.encryption_keys[1], Tag{}, b))};
  SecretKey k1 = ValueOrDie(KeyGen(setup.instance, Tag{}, Single(2, 0, 1, 3)));
  SecretKey k2 = ValueOrDie(KeyGen(setup.instance, Tag{}, Single(2, 0, 1, 3)));
  EXPECT_EQ(ValueOrDie(Decrypt(first, k1)), -36);
  EXPECT_EQ(ValueOrDie(Decrypt(second, k1)), -36);
  EXPECT_EQ(ValueOrDie(Decrypt(first, k2)), -36);
}

TEST(KeyGenTest, WrongDimension) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  EXPECT_FALSE(KeyGen(setup.instance, Tag{}, Single(3, 0, 1, 1)).ok());
}

TEST(DecryptTest, CrossInstanceFails) {
  SetupResult a = ValueOrDie(fe::Setup(2, {1, 1}));
  SetupResult b = ValueOrDie(fe::Setup(2, {1, 1}));
  std::vector<Ciphertext> cts = {
      ValueOrDie(Encrypt(a.encryption_keys[0], Tag{}, std::vector<int64_t>{1})),
      ValueOrDie(Encrypt(a.encryption_keys[1], Tag{}, std::vector<int64_t>{1}))};
  SecretKey key = ValueOrDie(KeyGen(b.instance, Tag{}, Single(2, 0, 1, 1)));
  absl::StatusOr<WideInt> r = Decrypt(cts, key);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(GetFeError(r.status()), FeError::kInstanceMismatch);
}

TEST(DecryptTest, MissingAndDuplicateSlots) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  Ciphertext c0 = ValueOrDie(
      Encrypt(setup.encryption_keys[0], Tag{}, std::vector<int64_t>{1}));
  SecretKey key = ValueOrDie(KeyGen(setup.instance, Tag{}, Single(2, 0, 0, 1)));
  std::vector<Ciphertext> missing = {c0};
  EXPECT_EQ(GetFeError(Decrypt(missing, key).status()), FeError::kMissingSlot);
  std::vector<Ciphertext> dup = {c0, c0};
  EXPECT_EQ(GetFeError(Decrypt(dup, key).status()), FeError::kDuplicateSlot);
}

TEST(DecryptTest, OverflowIsTyped) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  const int64_t big = int64_t{1} << 62;
  std::vector<Ciphertext> cts = {
      ValueOrDie(Encrypt(setup.encryption_keys[0], Tag{}, std::vector<int64_t>{big})),
      ValueOrDie(Encrypt(setup.encryption_keys[1], Tag{}, std::vector<int64_t>{big}))};
  SecretKey key =
      ValueOrDie(KeyGen(setup.instance, Tag{}, Single(2, 0, 1, big)));
  EXPECT_EQ(GetFeError(Decrypt(cts, key).status()), FeError::kOverflow);
}

TEST(GetFeErrorTest, PlainStatusHasNoKind) {
  EXPECT_FALSE(GetFeError(absl::OkStatus()).has_value());
  EXPECT_FALSE(GetFeError(absl::InternalError("x")).has_value());
  EXPECT_EQ(FeErrorName(FeError::kTagMismatch), "TagMismatch");
}

TEST(TagGatingTest, SucceedsIffAllTagsMatch) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {1, 1}));
  for (uint64_t t0 = 0; t0 < 4; ++t0) {
    for (uint64_t t1 = 0; t1 < 4; ++t1) {
      std::vector<Ciphertext> cts = {
          ValueOrDie(Encrypt(setup.encryption_keys[0], Tag{t0},
                             std::vector<int64_t>{2})),
          ValueOrDie(Encrypt(setup.encryption_keys[1], Tag{t1},
                             std::vector<int64_t>{3}))};
      for (uint64_t tk = 0; tk < 4; ++tk) {
        SecretKey key =
            ValueOrDie(KeyGen(setup.instance, Tag{tk}, Single(2, 0, 1, 1)));
        absl::StatusOr<WideInt> r = Decrypt(cts, key);
        if (t0 == tk && t1 == tk) {
          ASSERT_OK(r);
          EXPECT_EQ(*r, 6);
        } else {
          EXPECT_EQ(GetFeError(r.status()), FeError::kTagMismatch);
        }
      }
    }
  }
}

TEST(SingleEncryptionPerTagTest, SecondEncryptionRejected) {
  SetupResult setup =
      ValueOrDie(fe::Setup(2, {1, 1}, SetupOptions{.single_encryption_per_tag = true}));
  const std::vector<int64_t> v = {1};
  EXPECT_OK(Encrypt(setup.encryption_keys[0], Tag{1}, v));
  EXPECT_EQ(GetFeError(Encrypt(setup.encryption_keys[0], Tag{1}, v).status()),
            FeError::kDuplicateSlot);
  EXPECT_OK(Encrypt(setup.encryption_keys[0], Tag{2}, v));
  EXPECT_OK(Encrypt(setup.encryption_keys[1], Tag{1}, v));
}

TEST(AuditCountersTest, CountsOperations) {
  SetupResult setup = ValueOrDie(fe::Setup(3, {1, 1, 1}));
  AuditCounters fresh = GetAuditCounters(setup.instance);
  EXPECT_EQ(fresh.encryptions, 0u);
  EXPECT_EQ(fresh.keygens, 0u);
  EXPECT_EQ(fresh.decryptions, 0u);

  std::vector<Ciphertext> cts;
  for (size_t k = 0; k < 3; ++k) {
    cts.push_back(ValueOrDie(
        Encrypt(setup.encryption_keys[k], Tag{}, std::vector<int64_t>{1})));
  }
  SecretKey key = ValueOrDie(KeyGen(setup.instance, Tag{}, Single(3, 0, 1, 1)));
  EXPECT_OK(Decrypt(cts, key));
  EXPECT_OK(Decrypt(cts, key));
  std::vector<Ciphertext> partial = {cts[0]};
  EXPECT_FALSE(Decrypt(partial, key).ok());

  AuditCounters after = GetAuditCounters(setup.instance);
  EXPECT_EQ(after.encryptions, 3u);
  EXPECT_EQ(after.encryptions_per_slot, (std::vector<uint64_t>{1, 1, 1}));
  EXPECT_EQ(after.keygens, 1u);
  EXPECT_EQ(after.decryptions, 2u);
}

TEST(SealingTest, HeaderCarriesNoPlaintext) {
  SetupResult setup = ValueOrDie(fe::Setup(2, {2, 1}));
  const std::vector<int64_t> plaintext = {0x1122334455667788,
                                          987654321987654321};
  Ciphertext ct =
      ValueOrDie(Encrypt(setup.encryption_keys[0], Tag{3}, plaintext));
  const std::string header = ct.SerializeHeader();
  EXPECT_NE(header.find("\"slot\""), std::string::npos);
  for (int64_t v : plaintext) {
    EXPECT_EQ(header.find(std::to_string(v)), std::string::npos);
    std::string raw(sizeof(v), '\0');
    std::memcpy(raw.data(), &v, sizeof(v));
    EXPECT_EQ(header.find(raw), std::string::npos);
  }
}

}  // namespace
}  // namespace sfedv::fe
