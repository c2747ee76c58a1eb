#!/usr/bin/env python3
# Copyright 2026 The pgpfwd Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Independent big-integer oracle used to freeze expected values in tests.

Affine Montgomery-curve arithmetic (v^2 = u^3 + A u^2 + u over GF(2^255-19))
with plain double-and-add; nothing here shares code with the C++ library.
"""
import random

P = 2**255 - 19
A = 486662
N = 2**252 + 27742317777372353535851937790883648493


def le(x):
    return x.to_bytes(32, "little").hex()


def sqrt_mod(a):
    a %= P
    if a == 0:
        return 0
    c = pow(a, (P + 3) // 8, P)
    if c * c % P == a:
        return c
    c = c * pow(2, (P - 1) // 4, P) % P
    if c * c % P == a:
        return c
    return None


def add(p1, p2):
    if p1 is None:
        return p2
    if p2 is None:
        return p1
    (x1, y1), (x2, y2) = p1, p2
    if x1 == x2:
        if (y1 + y2) % P == 0:
            return None
        lam = (3 * x1 * x1 + 2 * A * x1 + 1) * pow(2 * y1, P - 2, P) % P
    else:
        lam = (y2 - y1) * pow(x2 - x1, P - 2, P) % P
    x3 = (lam * lam - A - x1 - x2) % P
    y3 = (lam * (x1 - x3) - y1) % P
    return (x3, y3)


def mul(k, pt):
    acc = None
    for bit in bin(k)[2:]:
        acc = add(acc, acc)
        if bit == "1":
            acc = add(acc, pt)
    return acc


def u_of(pt):
    return 0 if pt is None else pt[0]


def base():
    return (9, sqrt_mod(9**3 + A * 81 + 9))


def clamp(b):
    b = bytearray(b)
    b[0] &= 248
    b[31] &= 127
    b[31] |= 64
    return int.from_bytes(b, "little")


if __name__ == "__main__":
    G = base()
    print("n_plus_7", le(N + 7))
    print("half_n_plus_1", le((N + 1) // 2))
    print("two_pow_254_G", le(u_of(mul(2**254, G))))
    print("eight_G", le(u_of(mul(8, G))))
    # small-order u-coordinates on the curve: n * random point
    small = set()
    rng = random.Random(7)
    while len(small) < 4:
        u = rng.randrange(P)
        v = sqrt_mod(u**3 + A * u * u + u)
        if v is None:
            continue
        small.add(u_of(mul(N, (u, v))))
    print("curve_small_order_u", sorted(le(u) for u in small))
