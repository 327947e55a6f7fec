"""Pure numpy implementation of the phase-noise kernel."""
import numpy as np

BACKEND = "python"

_CHUNK = 2048


def accumulate_phase_paths(bit_generator, n_paths, n_steps, dt, d_omega, d_sigma, out,
                           path_offset=0):
    """Same contract as the compiled kernel; see ``csl_neutrino._accel``."""
    out = np.asarray(out)
    if out.shape != (4, n_steps + 1):
        raise ValueError("out must have shape (4, n_steps + 1)")
    rng = np.random.Generator(bit_generator)
    sqdt = np.sqrt(dt)
    t = np.arange(1, n_steps + 1) * dt
    for start in range(0, n_paths, _CHUNK):
        m = min(_CHUNK, n_paths - start)
        w = np.cumsum(sqdt * rng.standard_normal((m, n_steps)), axis=1)
        phi = d_omega * t + d_sigma * w
        finite = np.isfinite(phi)
        if not finite.all():
            bad = int(np.argmin(finite.all(axis=1)))
            raise FloatingPointError(f"non-finite phase on path {path_offset + start + bad}")
        cs = np.cos(phi)
        sn = np.sin(phi)
        out[0, 0] += m
        out[2, 0] += m
        out[0, 1:] += cs.sum(axis=0)
        out[1, 1:] += sn.sum(axis=0)
        out[2, 1:] += (cs * cs).sum(axis=0)
        out[3, 1:] += (sn * cs).sum(axis=0)
