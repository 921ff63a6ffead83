#pragma once

namespace mgdm {

// Reed-Solomon code parameters (symbols). t = floor((n - k) / 2) correctable
// symbols per codeword. Default RS(1023, 911) over 10-bit symbols: 12.3%
// overhead, t = 56.
struct FecSpec {
  int n = 1023;
  int k = 911;
  int b = 10;

  int t() const { return (n - k) / 2; }
  void validate() const;  // 0 < k < n <= 2^b - 1, t >= 1
};

// Code overhead (n - k) / k.
double overhead(const FecSpec& spec);

// Upper bound on the post-FEC BER: codeword-failure probability of the
// hard-decision bounded-distance decoder under memoryless symbol errors,
// p_s = 1 - (1 - pre_ber)^b, evaluated in the log domain.
double post_fec_bound(double pre_ber, const FecSpec& spec);

// Binomial tail P(X > t), X ~ Bin(n, p), log-domain; exposed for testing
// against exact summation.
double binomial_tail_above(int n, int t, double p);

// lanes * lane_rate / (1 + overhead)
double net_bit_rate(int lanes, double lane_rate, double overhead);

}  // namespace mgdm
