#pragma once

// Sign and normalization conventions shared by every multiplier, Lambda sum
// and energy in this library. Changing any of these changes them everywhere.
//
// Fourier coefficients:  f_hat(xi_k) = (sqrt(L)/K) sum_j f(x_j) e^{-i xi_k x_j}.
//   Coefficients are those of the orthonormal basis e^{i xi x}/sqrt(L);
//   Plancherel holds with constant 1.
//
// Lambda_n(M; w) = L^{1 - n/2} sum_{xi_1 + ... + xi_n = 0}
//     M(xi) w_hat(xi_1) conj(w_hat(-xi_2)) w_hat(xi_3) ... conj(w_hat(-xi_n)).
//   With this weight Lambda_n(1; w) = int |w|^n.
//
// Time derivative along i w_t + w_xx = -i w^2 conj(w)_x - |w|^4 w / 2:
//   d/dt Lambda_n(M) = Lambda_n(M alpha_n)
//                      - i Lambda_{n+2}( sum_j X_j^2(M) xi_{j+1} )
//                      + (i/2) Lambda_{n+4}( sum_j (-1)^{j+1} X_j^4(M) ),
//   alpha_n = i sum_j (-1)^j xi_j^2.
//
// beta6: the Lambda_6 kernel of d/dt E2 contains (i/6) sum_j (-1)^j m_j^2 xi_j^2
//   after symmetrization, i.e. the opposite sign of the commonly printed
//   -(i/6) sum (-1)^j m_j^2 xi_j^2. Only this sign makes M6 vanish when all
//   frequencies lie below N, and it is the sign used by beta6() below.
//
// Variant gauge: v = exp(-(3i/4) int |u|^2) u gives
//   H(u) = |v_x|_2^2 - |v|_6^6 / 16 exactly.

namespace dnls {

inline constexpr double kBeta6Sign = +1.0; // beta6 = kBeta6Sign * (i/6) sum (-1)^j m_j^2 xi_j^2

} // namespace dnls
