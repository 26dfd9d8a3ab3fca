############################################################################
# SPDX-License-Identifier: Apache-2.0
#
# Licensed to the Apache Software Foundation (ASF) under one or more
# contributor license agreements.  See the NOTICE file distributed with
# this work for additional information regarding copyright ownership.  The
# ASF licenses this file to you under the Apache License, Version 2.0 (the
# "License"); you may not use this file except in compliance with the
# License.  You may obtain a copy of the License at
#
#   http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.  See the
# License for the specific language governing permissions and limitations
# under the License.
#
############################################################################

"""Property suites behind the ``validate`` command."""

import time
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np

from ecpt.cipher.common import (
    DEFAULT_IV,
    DEFAULT_KEY,
    aes128_cbc_decrypt,
    aes128_cbc_encrypt,
)
from ecpt.dataset import IMAGE_SIZE, NUM_CLASSES
from ecpt.errors import ValidationError
from ecpt.lemmas import mc_validate_lemma1, mc_validate_lemma2
from ecpt.logger import logger
from ecpt.mlp import Architecture, gradient_check, init_model

EncryptFn = Callable[[bytes, bytes, bytes], bytes]

# (key, iv, plaintext, ciphertext); single block CBC with zero IV is the
# bare block cipher
AES_VECTORS = (
    (
        "000102030405060708090a0b0c0d0e0f",
        "00000000000000000000000000000000",
        "00112233445566778899aabbccddeeff",
        "69c4e0d86a7b0430d8cdb78070b4c55a",
    ),
    (
        "2b7e151628aed2a6abf7158809cf4f3c",
        "000102030405060708090a0b0c0d0e0f",
        "6bc1bee22e409f96e93d7e117393172a"
        "ae2d8a571e03ac9c9eb76fac45af8e51",
        "7649abac8119b246cee98e9b12e9197d"
        "5086cb9b507219ee95db113a917678b2",
    ),
)

MC_DISTS = ("uniform", "exponential", "pareto")
MC_SIZES = (50, 500, 5000)
MC_LEVEL = 0.4

GRADCHECK_NETS = 100
GRADCHECK_TOL = 1e-4
INJECTIVITY_INPUTS = 10_000

###############################################################################
# Class: SuiteResult
###############################################################################


@dataclass
class SuiteResult:
    """Result of one property suite."""

    name: str
    passed: bool
    checks: int = 0
    failures: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    def __str__(self) -> str:
        """Return one-line summary."""
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{self.name:<14} {status} checks={self.checks} "
            f"failures={len(self.failures)} time={self.elapsed:.1f}s"
        )


###############################################################################
# Class: Validator
###############################################################################


class Validator:
    """Run cipher, gradient and Monte Carlo property suites.

    ``encrypt`` replaces the AES-CBC primitive under test, which lets a
    broken cipher be injected as a negative control.
    """

    def __init__(
        self,
        trials: int = 10_000,
        seed: int = 2024,
        encrypt: Optional[EncryptFn] = None,
        images: Optional[np.ndarray] = None,
    ) -> None:
        """Initialize validator."""
        if trials < 1:
            raise ValueError("trials must be positive")
        self._trials = trials
        self._seed = seed
        self._encrypt: EncryptFn = encrypt or aes128_cbc_encrypt
        self._images = images
        self._results: List[SuiteResult] = []

    @property
    def results(self) -> List[SuiteResult]:
        """Get results of the last run."""
        return self._results

    @property
    def passed(self) -> bool:
        """Check if all suites passed."""
        return bool(self._results) and all(r.passed for r in self._results)

    def _suite(self, name: str, fn: Callable[[SuiteResult], None]) -> None:
        res = SuiteResult(name, True)
        start = time.perf_counter()
        fn(res)
        res.elapsed = time.perf_counter() - start
        res.passed = not res.failures
        logger.info(str(res))
        self._results.append(res)

    def aes_vectors(self, res: SuiteResult) -> None:
        """Check the block cipher against published vectors."""
        for key, iv, pt, ct in AES_VECTORS:
            k, v = bytes.fromhex(key), bytes.fromhex(iv)
            res.checks += 1
            got = self._encrypt(bytes.fromhex(pt), k, v)
            if bytes(got).hex() != ct:
                res.failures.append(f"encrypt {pt[:32]}: {bytes(got).hex()}")
                continue
            res.checks += 1
            if aes128_cbc_decrypt(bytes.fromhex(ct), k, v).hex() != pt:
                res.failures.append(f"decrypt {ct[:32]}")

    def cbc_roundtrip(self, res: SuiteResult) -> None:
        """Decrypt(encrypt(x)) is the identity on random images."""
        rng = np.random.default_rng([self._seed, 1])
        for _ in range(self._trials):
            pt = rng.integers(0, 256, IMAGE_SIZE, dtype=np.uint8).tobytes()
            key = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
            iv = rng.integers(0, 256, 16, dtype=np.uint8).tobytes()
            res.checks += 1
            ct = bytes(self._encrypt(pt, key, iv))
            if len(ct) != IMAGE_SIZE or aes128_cbc_decrypt(ct, key, iv) != pt:
                res.failures.append(f"round trip failed for key {key.hex()}")
                # one is enough to fail the suite
                break

    def determinism(self, res: SuiteResult) -> None:
        """Equal plaintexts give equal ciphertexts, distinct ones differ."""
        rng = np.random.default_rng([self._seed, 2])
        count = min(self._trials, INJECTIVITY_INPUTS)
        images = rng.integers(0, 256, (count, IMAGE_SIZE), dtype=np.uint8)
        if self._images is not None:
            given = np.asarray(self._images, dtype=np.uint8)
            images = np.concatenate([given.reshape(-1, IMAGE_SIZE), images])

        plain = [img.tobytes() for img in images]
        cipher = [self._encrypt(p, DEFAULT_KEY, DEFAULT_IV) for p in plain]
        again = [self._encrypt(p, DEFAULT_KEY, DEFAULT_IV) for p in plain]

        res.checks += len(plain)
        if [bytes(c) for c in cipher] != [bytes(c) for c in again]:
            res.failures.append("repeated encryption differs")

        # injective on distinct inputs
        res.checks += 1
        if len(set(plain)) != len({bytes(c) for c in cipher}):
            res.failures.append("distinct plaintexts collide")

    def gradients(self, res: SuiteResult) -> None:
        """Backprop agrees with finite differences on small networks."""
        rng = np.random.default_rng([self._seed, 3])
        for net in range(GRADCHECK_NETS):
            depth = int(rng.integers(1, 3))
            hidden = tuple(int(h) for h in rng.integers(4, 17, depth))
            dim = int(rng.integers(8, 33))
            arch = Architecture.from_hidden(hidden, "gradcheck", dim)
            model = init_model(arch, seed=self._seed + net)
            x = rng.uniform(0.0, 1.0, dim)
            label = int(rng.integers(0, NUM_CLASSES))

            res.checks += 1
            err = gradient_check(model, x, label, seed=net)
            if not err < GRADCHECK_TOL:
                res.failures.append(f"net {net} {arch.dims}: error {err:g}")

    def lemmas(self, res: SuiteResult) -> None:
        """Monte Carlo coverage checks of both thresholding rules."""
        for dist in MC_DISTS:
            for n in MC_SIZES:
                for mc in (
                    mc_validate_lemma1(
                        n, MC_LEVEL, self._trials, dist, self._seed + n
                    ),
                    mc_validate_lemma2(
                        n, MC_LEVEL, self._trials, dist, self._seed + n
                    ),
                ):
                    res.checks += 1
                    if not mc.passed:
                        res.failures.append(str(mc))

    def run(self) -> List[SuiteResult]:
        """Run all suites."""
        self._results = []
        self._suite("aes_vectors", self.aes_vectors)
        self._suite("cbc_roundtrip", self.cbc_roundtrip)
        self._suite("determinism", self.determinism)
        self._suite("gradients", self.gradients)
        self._suite("lemmas", self.lemmas)
        return self._results

    def check(self) -> None:
        """Raise if any suite failed."""
        failed = [r.name for r in self._results if not r.passed]
        if failed:
            raise ValidationError(f"failed suites: {', '.join(failed)}")
