#!/usr/bin/env python3
"""Independent reference values frozen into the C++ unit tests.

Uses only the Python standard library and mpmath, never the C++ code.
Run: python3 tests/oracles/reference_values.py
"""
import hashlib
import hmac

import mpmath as mp


def session_key(mk: bytes, c_s: int) -> bytes:
    return hmac.new(mk, c_s.to_bytes(8, "big"), hashlib.sha256).digest()


def q_quad(x):
    return mp.quad(lambda z: mp.exp(-z * z / 2) / mp.sqrt(2 * mp.pi), [x, mp.inf])


def q_inv(eps, lo=-40.0, hi=40.0):
    for _ in range(200):
        mid = (lo + hi) / 2
        if q_quad(mid) > eps:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


if __name__ == "__main__":
    mp.mp.dps = 30
    mk = bytes([0x0B] * 32)
    for c in (0, 1, 2):
        print(f"SK(32x0x0b, {c}) = {session_key(mk, c).hex()}")
    sk0 = session_key(mk, 0)
    for c_m in (1, 2):
        d = hmac.new(sk0, c_m.to_bytes(8, "big"), hashlib.sha256).digest()
        x = 0
        for b in d:
            x ^= b
        print(f"A_m(c_m={c_m}) last8 = {c_m:06x}{d[-1]:02x}  xor8 = {c_m:06x}{x:02x}")
    # RFC 4231 test case 1 as a sanity anchor.
    print("RFC4231-1 =", hmac.new(bytes([0x0B] * 20), b"Hi There", hashlib.sha256).hexdigest())
    for x in (0.0, 1.0, 2.326, 2.727, 3.0, mp.mpf(3) / mp.mpf("1.1")):
        print(f"Q({x}) = {mp.nstr(q_quad(x), 17)}")
    print("Qinv(0.01) =", mp.nstr(q_inv(mp.mpf("0.01")), 17))
    print("Qinv(0.001) =", mp.nstr(q_inv(mp.mpf("0.001")), 17))
