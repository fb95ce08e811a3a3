import pytest

from crnaccess import SystemParams

# parameter set used throughout the numerical-results discussion
PAPER = SystemParams(M=7, k=10, lambda_p=0.05, mu_p=0.4, lambda_s=0.25,
                     mu_s=0.5, M_rp=2, M1_prime=1, M_r2=1, m=2, n=1)

# mixed small/medium instances (all M <= 8) exercising reservations,
# aggregation widths, equal widths and a finite PU population below M
INSTANCES = [
    PAPER,
    SystemParams(M=1, k=1, lambda_p=1.0, mu_p=1.0, lambda_s=1.0, mu_s=1.0),
    SystemParams(M=4, k=3, lambda_p=0.2, mu_p=0.5, lambda_s=0.3, mu_s=0.6,
                 M_rp=1, M1_prime=1, M_r2=1, m=2, n=1),
    SystemParams(M=8, k=12, lambda_p=0.1, mu_p=0.4, lambda_s=0.2, mu_s=0.5,
                 M_rp=2, M1_prime=2, M_r2=2, m=3, n=2),
    SystemParams(M=4, k=2, lambda_p=0.4, mu_p=0.6, lambda_s=0.5, mu_s=0.7,
                 M_rp=1, M1_prime=1, M_r2=0, m=2, n=2),
    SystemParams(M=6, k=9, lambda_p=0.15, mu_p=0.35, lambda_s=0.25, mu_s=0.45,
                 M_rp=3, M1_prime=1, M_r2=0, m=3, n=1),
]


@pytest.fixture(scope="session")
def paper_params():
    return PAPER


@pytest.fixture(scope="session", params=INSTANCES,
                ids=lambda p: f"M{p.M}k{p.k}rp{p.M_rp}m{p.m}n{p.n}")
def instance(request):
    return request.param
