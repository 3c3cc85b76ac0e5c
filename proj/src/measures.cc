// Copyright 2026 The bestexp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bestexp/measures.h"

#include <gmp.h>

#include <algorithm>
#include <cmath>
#include <utility>

#include "bestexp/error.h"
#include "bestexp/rng.h"

namespace bestexp {

// ---------------------------------------------------------------------------
// BitString

BitString::BitString(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  for (auto b : bits_) {
    if (b > 1) throw Error(ErrorKind::kDomain, "bit value must be 0 or 1");
  }
}

BitString BitString::FromString(std::string_view text) {
  std::vector<std::uint8_t> bits;
  bits.reserve(text.size());
  for (char ch : text) {
    if (ch != '0' && ch != '1') {
      throw Error(ErrorKind::kParse, "bit string may contain only '0' and '1'");
    }
    bits.push_back(static_cast<std::uint8_t>(ch - '0'));
  }
  return BitString(std::move(bits));
}

BitString BitString::Repeat(int bit, std::size_t count) {
  if (bit != 0 && bit != 1) throw Error(ErrorKind::kDomain, "bit value must be 0 or 1");
  return BitString(std::vector<std::uint8_t>(count, static_cast<std::uint8_t>(bit)));
}

void BitString::push_back(int bit) {
  if (bit != 0 && bit != 1) throw Error(ErrorKind::kDomain, "bit value must be 0 or 1");
  bits_.push_back(static_cast<std::uint8_t>(bit));
}

BitString BitString::Prefix(std::size_t length) const {
  if (length > bits_.size()) throw Error(ErrorKind::kDomain, "prefix longer than string");
  return BitString(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + length));
}

BitString BitString::Append(int bit) const {
  BitString out = *this;
  out.push_back(bit);
  return out;
}

std::string BitString::ToString() const {
  std::string s;
  s.reserve(bits_.size());
  for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
  return s;
}

// ---------------------------------------------------------------------------
// MeasureSpec

const char* FamilyName(Family family) {
  switch (family) {
    case Family::kBernoulli: return "bernoulli";
    case Family::kMarkov1: return "markov1";
    case Family::kInterval: return "interval";
    case Family::kAverage: return "average";
  }
  return "unknown";
}

struct MeasureSpec::Impl {
  Family family;
  std::variant<BernoulliParams, Markov1Params, IntervalParams, AverageParams> params;
  std::optional<TransitionKernel> kernel;
  std::optional<std::string> name;
};

namespace {

void CheckProbability(const Rational& v, const char* what) {
  if (sgn(v) < 0 || v > 1) {
    throw Error(ErrorKind::kDomain,
                std::string(what) + " must lie in [0, 1], got " + FormatRational(v));
  }
}

TransitionKernel MakeKernel(const std::array<Rational, 3>& one) {
  TransitionKernel k;
  for (int s = 0; s < 3; ++s) {
    k.one[s] = one[s];
    k.one_d[s] = one[s].get_d();
    k.log_one[s] = Log2Exact(one[s]);
    k.log_zero[s] = Log2Exact(Rational(1) - one[s]);
  }
  return k;
}

bool IsPowerOfTwo(const mpz_class& v) {
  return sgn(v) > 0 && mpz_popcount(v.get_mpz_t()) == 1;
}

}  // namespace

MeasureSpec MeasureSpec::Bernoulli(const Rational& theta) {
  Rational t = theta;
  t.canonicalize();
  CheckProbability(t, "bernoulli theta");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kBernoulli;
  impl->params = BernoulliParams{t};
  impl->kernel = MakeKernel({t, t, t});
  return MeasureSpec(std::move(impl));
}

MeasureSpec MeasureSpec::Markov1(const Rational& theta0, const Rational& theta1,
                                 const Rational& theta_init) {
  Markov1Params p{theta0, theta1, theta_init};
  p.theta0.canonicalize();
  p.theta1.canonicalize();
  p.theta_init.canonicalize();
  CheckProbability(p.theta0, "markov1 theta0");
  CheckProbability(p.theta1, "markov1 theta1");
  CheckProbability(p.theta_init, "markov1 theta_init");
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kMarkov1;
  impl->kernel = MakeKernel({p.theta0, p.theta1, p.theta_init});
  impl->params = std::move(p);
  return MeasureSpec(std::move(impl));
}

MeasureSpec MeasureSpec::Interval(const Rational& alpha, int precision_bits) {
  Rational a = alpha;
  a.canonicalize();
  if (precision_bits < 1) throw Error(ErrorKind::kDomain, "interval precision_bits must be >= 1");
  if (sgn(a) <= 0 || a > 1) {
    throw Error(ErrorKind::kDomain, "interval alpha must lie in (0, 1], got " + FormatRational(a));
  }
  if (!IsPowerOfTwo(a.get_den()) ||
      mpz_sizeinbase(a.get_den().get_mpz_t(), 2) - 1 > static_cast<std::size_t>(precision_bits)) {
    throw Error(ErrorKind::kDomain,
                "interval alpha must be dyadic with at most precision_bits fractional bits");
  }
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kInterval;
  impl->params = IntervalParams{a, precision_bits};
  return MeasureSpec(std::move(impl));
}

MeasureSpec MeasureSpec::Average(const MeasureSpec& left, const MeasureSpec& right) {
  if (!left.IsMeasure() || !right.IsMeasure()) {
    throw Error(ErrorKind::kNotAMeasure, "average needs two measures");
  }
  const auto& kl = left.kernel();
  const auto& kr = right.kernel();
  std::array<Rational, 3> one;
  for (int s = 0; s < 3; ++s) {
    one[s] = (kl.one[s] + kr.one[s]) / 2;
    one[s].canonicalize();
  }
  auto impl = std::make_shared<Impl>();
  impl->family = Family::kAverage;
  impl->params = AverageParams{std::make_shared<const MeasureSpec>(left),
                               std::make_shared<const MeasureSpec>(right)};
  impl->kernel = MakeKernel(one);
  return MeasureSpec(std::move(impl));
}

Family MeasureSpec::family() const { return impl_->family; }

const BernoulliParams& MeasureSpec::bernoulli() const {
  return std::get<BernoulliParams>(impl_->params);
}
const Markov1Params& MeasureSpec::markov1() const {
  return std::get<Markov1Params>(impl_->params);
}
const IntervalParams& MeasureSpec::interval() const {
  return std::get<IntervalParams>(impl_->params);
}
const AverageParams& MeasureSpec::average() const {
  return std::get<AverageParams>(impl_->params);
}

const TransitionKernel& MeasureSpec::kernel() const {
  if (!impl_->kernel) throw Error(ErrorKind::kNotAMeasure, "interval spec has no kernel");
  return *impl_->kernel;
}

const std::optional<std::string>& MeasureSpec::name() const { return impl_->name; }

MeasureSpec MeasureSpec::WithName(std::string name) const {
  auto impl = std::make_shared<Impl>(*impl_);
  impl->name = std::move(name);
  return MeasureSpec(std::move(impl));
}

std::string MeasureSpec::Canonical() const {
  switch (family()) {
    case Family::kBernoulli:
      return "bernoulli(" + FormatRational(bernoulli().theta) + ")";
    case Family::kMarkov1: {
      const auto& m = markov1();
      return "markov1(" + FormatRational(m.theta0) + "," + FormatRational(m.theta1) + "," +
             FormatRational(m.theta_init) + ")";
    }
    case Family::kInterval: {
      const auto& i = interval();
      return "interval(" + FormatRational(i.alpha) + "," + std::to_string(i.precision_bits) + ")";
    }
    case Family::kAverage:
      return "average(" + average().left->Canonical() + "," + average().right->Canonical() + ")";
  }
  return "";
}

std::string MeasureSpec::Describe() const {
  if (impl_->name) return *impl_->name;
  if (family() == Family::kInterval) {
    return "interval(" + std::to_string(interval().precision_bits) + " bits)";
  }
  if (family() == Family::kAverage) {
    return "average(" + average().left->Describe() + "," + average().right->Describe() + ")";
  }
  return Canonical();
}

bool MeasureSpec::SameAs(const MeasureSpec& other) const {
  if (family() != other.family()) return false;
  switch (family()) {
    case Family::kBernoulli:
      return bernoulli().theta == other.bernoulli().theta;
    case Family::kMarkov1:
      return markov1().theta0 == other.markov1().theta0 &&
             markov1().theta1 == other.markov1().theta1 &&
             markov1().theta_init == other.markov1().theta_init;
    case Family::kInterval:
      return interval().alpha == other.interval().alpha &&
             interval().precision_bits == other.interval().precision_bits;
    case Family::kAverage:
      return average().left->SameAs(*other.average().left) &&
             average().right->SameAs(*other.average().right);
  }
  return false;
}

ProbValue ProbValue::FromExact(const Rational& exact) {
  return ProbValue{exact, LogProb{Log2Exact(exact)}};
}

// ---------------------------------------------------------------------------
// MeasureCursor

namespace {

Rational PowRational(const Rational& base, std::uint64_t exponent) {
  if (exponent == 0) return Rational(1);
  mpz_class num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num().get_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den().get_mpz_t(), exponent);
  Rational out;
  out.get_num() = num;
  out.get_den() = den;
  return out;  // base is canonical, so its powers are too
}

}  // namespace

MeasureCursor::MeasureCursor(MeasureSpec spec) : spec_(std::move(spec)) {
  if (spec_.IsMeasure()) {
    state_ = KernelState{};
  } else {
    const auto& p = spec_.interval();
    IntervalState s;
    s.alpha_units = p.alpha.get_num() * (mpz_class(1) << p.precision_bits) / p.alpha.get_den();
    s.low_units = 0;
    state_ = std::move(s);
  }
}

bool MeasureCursor::CanPush() const {
  if (spec_.IsMeasure()) return true;
  return depth_ + 1 < static_cast<std::size_t>(spec_.interval().precision_bits);
}

void MeasureCursor::Push(int bit) {
  if (bit != 0 && bit != 1) throw Error(ErrorKind::kDomain, "bit value must be 0 or 1");
  if (auto* ks = std::get_if<KernelState>(&state_)) {
    if (depth_ == 0) {
      ks->first = bit;
    } else {
      ++ks->counts[ks->last][bit];
    }
    ks->last = bit;
  } else {
    if (!CanPush()) {
      throw Error(ErrorKind::kDepthExceeded,
                  "interval spec evaluated at depth " + std::to_string(depth_ + 1) +
                      " with precision_bits " + std::to_string(spec_.interval().precision_bits));
    }
    auto& is = std::get<IntervalState>(state_);
    const int bits = spec_.interval().precision_bits;
    if (bit) is.low_units += mpz_class(1) << (bits - static_cast<int>(depth_) - 1);
  }
  ++depth_;
}

mpz_class MeasureCursor::IntervalMassUnits(const mpz_class& low, int depth) const {
  const auto& is = std::get<IntervalState>(state_);
  const int bits = spec_.interval().precision_bits;
  mpz_class span = mpz_class(1) << (bits - depth);
  mpz_class mass = is.alpha_units - low;
  if (sgn(mass) < 0) mass = 0;
  if (mass > span) mass = span;
  return mass;
}

double MeasureCursor::LogProb() const {
  if (const auto* ks = std::get_if<KernelState>(&state_)) {
    const auto& k = spec_.kernel();
    if (depth_ == 0) return 0.0;
    double log = ks->first ? k.log_one[TransitionKernel::kInitial]
                           : k.log_zero[TransitionKernel::kInitial];
    for (int a = 0; a < 2; ++a) {
      if (ks->counts[a][0]) log += static_cast<double>(ks->counts[a][0]) * k.log_zero[a];
      if (ks->counts[a][1]) log += static_cast<double>(ks->counts[a][1]) * k.log_one[a];
    }
    return log;
  }
  const auto& is = std::get<IntervalState>(state_);
  mpz_class mass = IntervalMassUnits(is.low_units, static_cast<int>(depth_));
  if (sgn(mass) == 0) return LogProb::Zero().value;
  return Log2Exact(Rational(mass)) - spec_.interval().precision_bits;
}

Rational MeasureCursor::ExactProb() const {
  if (const auto* ks = std::get_if<KernelState>(&state_)) {
    const auto& k = spec_.kernel();
    if (depth_ == 0) return Rational(1);
    const Rational& init = k.one[TransitionKernel::kInitial];
    Rational out = ks->first ? init : Rational(1 - init);
    for (int a = 0; a < 2; ++a) {
      if (ks->counts[a][0]) out *= PowRational(Rational(1 - k.one[a]), ks->counts[a][0]);
      if (ks->counts[a][1]) out *= PowRational(k.one[a], ks->counts[a][1]);
    }
    return out;
  }
  const auto& is = std::get<IntervalState>(state_);
  Rational out(IntervalMassUnits(is.low_units, static_cast<int>(depth_)),
               mpz_class(1) << spec_.interval().precision_bits);
  out.canonicalize();
  return out;
}

ProbValue MeasureCursor::Prob() const { return ProbValue{ExactProb(), {LogProb()}}; }

bool MeasureCursor::IsZero() const { return LogProb() == LogProb::Zero().value; }

Rational MeasureCursor::CondProbExact(int bit) const {
  if (bit != 0 && bit != 1) throw Error(ErrorKind::kDomain, "bit value must be 0 or 1");
  if (const auto* ks = std::get_if<KernelState>(&state_)) {
    if (IsZero()) throw Error(ErrorKind::kZeroContext, "conditioning on a zero-mass string");
    const Rational& one = spec_.kernel().one[ks->last];
    return bit ? one : Rational(1 - one);
  }
  if (!CanPush()) {
    throw Error(ErrorKind::kDepthExceeded, "conditional beyond the interval precision horizon");
  }
  const auto& is = std::get<IntervalState>(state_);
  const int d = static_cast<int>(depth_);
  mpz_class parent = IntervalMassUnits(is.low_units, d);
  if (sgn(parent) == 0) throw Error(ErrorKind::kZeroContext, "conditioning on a zero-mass string");
  const int bits = spec_.interval().precision_bits;
  mpz_class low = is.low_units;
  if (bit) low += mpz_class(1) << (bits - d - 1);
  Rational out(IntervalMassUnits(low, d + 1), parent);
  out.canonicalize();
  return out;
}

double MeasureCursor::CondProb(int bit) const {
  if (const auto* ks = std::get_if<KernelState>(&state_)) {
    if (bit != 0 && bit != 1) throw Error(ErrorKind::kDomain, "bit value must be 0 or 1");
    if (IsZero()) throw Error(ErrorKind::kZeroContext, "conditioning on a zero-mass string");
    const double one = spec_.kernel().one_d[ks->last];
    return bit ? one : 1.0 - one;
  }
  return CondProbExact(bit).get_d();
}

// ---------------------------------------------------------------------------
// Free functions

namespace {

MeasureCursor Walk(const MeasureSpec& spec, const BitString& x) {
  MeasureCursor cursor(spec);
  for (std::size_t i = 0; i < x.size(); ++i) cursor.Push(x[i]);
  return cursor;
}

}  // namespace

ProbValue MeasureProb(const MeasureSpec& spec, const BitString& x) {
  return Walk(spec, x).Prob();
}

double MeasureLogProb(const MeasureSpec& spec, const BitString& x) {
  return Walk(spec, x).LogProb();
}

double CondProb(const MeasureSpec& spec, const BitString& x, int bit) {
  return Walk(spec, x).CondProb(bit);
}

Rational CondProbExact(const MeasureSpec& spec, const BitString& x, int bit) {
  return Walk(spec, x).CondProbExact(bit);
}

MeasureSpec AverageMeasure(const MeasureSpec& p, const MeasureSpec& q) {
  return MeasureSpec::Average(p, q);
}

BitString SampleSequence(const MeasureSpec& spec, std::size_t n, std::uint64_t seed) {
  if (!spec.IsMeasure()) throw Error(ErrorKind::kNotAMeasure, "cannot sample a semimeasure");
  const auto& k = spec.kernel();
  // Bit is 1 iff u < floor(theta * 2^64), with theta = 1 always 1.
  std::array<std::uint64_t, 3> threshold{};
  std::array<bool, 3> always_one{};
  for (int s = 0; s < 3; ++s) {
    if (k.one[s] == 1) {
      always_one[s] = true;
      continue;
    }
    mpz_class t = k.one[s].get_num() * (mpz_class(1) << 64) / k.one[s].get_den();
    threshold[s] = static_cast<std::uint64_t>(mpz_get_ui(t.get_mpz_t()));
  }
  CounterRng rng(seed);
  std::vector<std::uint8_t> bits;
  bits.reserve(n);
  int state = TransitionKernel::kInitial;
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint64_t u = rng.NextU64();
    const int bit = (always_one[state] || u < threshold[state]) ? 1 : 0;
    bits.push_back(static_cast<std::uint8_t>(bit));
    state = bit;
  }
  return BitString(std::move(bits));
}

}  // namespace bestexp
