"""Compare the compiled and pure-numpy image kernel backends.

Run directly:  python3 benchmarks/bench_kernels.py

The backend is chosen at import time from the DIA_PURE_NUMPY environment
variable, so this script re-imports the kernel module once per backend in a
subprocess-free way by calling both implementations explicitly.
"""

import time

import numpy as np

from dia.kernels import _numpy as np_impl

try:
    from dia.kernels import _numba as nb_impl
except ImportError:
    nb_impl = None


def bench(fn, *args, repeats=20):
    fn(*args)  # warm up (JIT compilation for the numba path)
    start = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - start) / repeats


def main():
    rng = np.random.default_rng(0)
    image = rng.random((3, 256, 256)).astype(np.float32)

    cases = [
        ("bilinear_resize 256->64", "bilinear_resize", (image, 64, 64)),
        ("bilinear_resize 64->256", "bilinear_resize",
         (rng.random((3, 64, 64)).astype(np.float32), 256, 256)),
        ("gaussian_blur k=7", "gaussian_blur", (image, 7)),
        ("median_blur k=7", "median_blur", (image, 7)),
    ]

    print(f"{'kernel':28s} {'numpy (ms)':>12s} {'numba (ms)':>12s} {'speedup':>9s}")
    for label, name, args in cases:
        t_np = bench(getattr(np_impl, name), *args)
        if nb_impl is None:
            print(f"{label:28s} {t_np * 1e3:12.3f} {'n/a':>12s} {'n/a':>9s}")
            continue
        t_nb = bench(getattr(nb_impl, name), *args)
        out_np = getattr(np_impl, name)(*args)
        out_nb = getattr(nb_impl, name)(*args)
        err = float(np.abs(out_np - out_nb).max())
        print(f"{label:28s} {t_np * 1e3:12.3f} {t_nb * 1e3:12.3f} "
              f"{t_np / t_nb:8.1f}x  (max diff {err:.2e})")


if __name__ == "__main__":
    main()
