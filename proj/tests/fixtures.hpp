#pragma once

#include "secmec/model.hpp"

namespace secmec::test {

inline TaskSpec task(double s_bits, double c, double T, double E, double p_max, double F_local) {
  TaskSpec t;
  t.s_bits = s_bits;
  t.c_cycles_per_bit = c;
  t.T_max_s = T;
  t.E_budget_J = E;
  t.p_max_W = p_max;
  t.p_circuit_W = 1e-4;
  t.F_local_Hz = F_local;
  t.eta = 1e-24;
  return t;
}

inline SystemConfig system(int K, int M, int N, const TaskSpec& t, double F_mec = 1e8,
                           double c_mec = 1000.0) {
  SystemConfig c;
  c.K = K;
  c.M = M;
  c.N = N;
  c.B_Hz = 1e4;
  c.sigma2_W = 1e-13;
  c.c_mec_cycles_per_bit.assign(M, c_mec);
  c.F_mec_Hz.assign(M, F_mec);
  c.tasks.assign(K, t);
  return c;
}

// Every h entry set to h, every eavesdropper ratio to g, zero uncertainty.
inline ChannelState flat_channels(const SystemConfig& c, double h, double g) {
  ChannelState ch(c.K, c.N, c.M, 0.0, c.sigma2_W);
  std::fill(ch.h_tilde.begin(), ch.h_tilde.end(), h);
  std::fill(ch.g_bar.begin(), ch.g_bar.end(), g);
  return ch;
}

}  // namespace secmec::test
