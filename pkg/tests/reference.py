"""Independent arbitrary-precision references shared by several test files."""
import mpmath as mp

HBAR_EV_S = "6.582119569e-16"


def cgs_oracle(m_j_ev, m_k_ev, E_ev=1e19, L_m=1e25):
    """Diosi-Penrose exponent with every input converted to cm, g, s, erg by hand."""
    with mp.workdps(40):
        erg_per_ev = mp.mpf("1.602176634e-12")
        c = mp.mpf("2.99792458e10")  # cm/s
        hbar = mp.mpf(HBAR_EV_S) * erg_per_ev  # erg s
        G = mp.mpf("6.67430e-8")  # cm^3 g^-1 s^-2
        GeV = mp.mpf(10) ** 9 * erg_per_ev
        GF = mp.mpf("1.1663787e-5") / GeV ** 2 * (hbar * c) ** 3  # erg cm^3
        mj = mp.mpf(m_j_ev) * erg_per_ev / c ** 2  # g
        mk = mp.mpf(m_k_ev) * erg_per_ev / c ** 2
        E = mp.mpf(E_ev) * erg_per_ev
        L = mp.mpf(L_m) * 100
        first = 3 * (mj + mk) * hbar ** 2 / (5 * GF)
        arg = 6 * (mj + mk) * mp.pi * hbar ** 3 * c / (5 * mj * mk * GF * E)
        second = mj * mk * E / (2 * mp.pi * hbar * c) * mp.log(arg)
        return 8 * mp.pi * G / (hbar * c) * (first - second) * L


def two_flavor_survival(theta, m1, m2, p, t):
    """1 - sin^2(2 theta) sin^2(dE t / 2 hbar) with exact relativistic energies."""
    with mp.workdps(40):
        m1, m2, p = mp.mpf(m1), mp.mpf(m2), mp.mpf(p)
        dE = mp.sqrt(p ** 2 + m2 ** 2) - mp.sqrt(p ** 2 + m1 ** 2)
        phase = dE * mp.mpf(t) / mp.mpf(HBAR_EV_S)
        return 1 - mp.sin(2 * mp.mpf(theta)) ** 2 * mp.sin(phase / 2) ** 2


def ur_error_times_t(m_j, m_k, E, t):
    """dm2 (m_j^2 + m_k^2) / (8 E^3 hbar) * t."""
    with mp.workdps(40):
        m_j, m_k = mp.mpf(m_j), mp.mpf(m_k)
        dm2 = m_k ** 2 - m_j ** 2
        return dm2 * (m_j ** 2 + m_k ** 2) / (8 * mp.mpf(E) ** 3 * mp.mpf(HBAR_EV_S)) * mp.mpf(t)
