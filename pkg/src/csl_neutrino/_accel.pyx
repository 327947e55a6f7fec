# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled phase-noise accumulation kernel."""
from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport cos, sin, sqrt, isfinite
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport random_standard_normal

BACKEND = "cython"


def accumulate_phase_paths(bit_generator, Py_ssize_t n_paths, Py_ssize_t n_steps, double dt,
                           double d_omega, double d_sigma, double[:, ::1] out,
                           Py_ssize_t path_offset=0):
    """Add the phase moments of ``n_paths`` paths into ``out``.

    ``out`` has shape (4, n_steps + 1) and receives, at every grid time
    t_n = n dt, the sums over paths of cos(phi), sin(phi), cos(phi)^2 and
    sin(phi) cos(phi), where phi = d_omega t_n + d_sigma W(t_n). Normals are
    drawn path-major from ``bit_generator``, the same order as
    ``Generator(bit_generator).standard_normal((n_paths, n_steps))``.
    """
    cdef const char *name = "BitGenerator"
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, name):
        raise ValueError("invalid bit generator capsule")
    if out.shape[0] != 4 or out.shape[1] != n_steps + 1:
        raise ValueError("out must have shape (4, n_steps + 1)")
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, name)
    cdef double sqdt = sqrt(dt)
    cdef double w, phi, cs, sn
    cdef Py_ssize_t p, n
    cdef Py_ssize_t bad = -1
    with bit_generator.lock, nogil:
        for p in range(n_paths):
            w = 0.0
            out[0, 0] += 1.0
            out[2, 0] += 1.0
            for n in range(1, n_steps + 1):
                w = w + sqdt * random_standard_normal(rng)
                phi = d_omega * (n * dt) + d_sigma * w
                if not isfinite(phi):
                    bad = p
                    break
                cs = cos(phi)
                sn = sin(phi)
                out[0, n] += cs
                out[1, n] += sn
                out[2, n] += cs * cs
                out[3, n] += sn * cs
            if bad >= 0:
                break
    if bad >= 0:
        raise FloatingPointError(f"non-finite phase on path {path_offset + bad}")
