
# coding: utf-8

# # Verification suite
#
# `run_suite` runs every registered numerical check over a list of parameter sets and returns a report with one result per check and parameter set.

# In[1]:

from sunn_reduction import ModelParams, run_suite
from sunn_reduction.verify import REGISTRY

sorted(REGISTRY)


# In[2]:

report = run_suite([ModelParams(2, 1.0, 0.3, 0.5)], seed=42, sample_count=10)
for r in report.results:
    print(f"{r.name:28s} {r.residual:9.2e} <= {r.tolerance:7.1e}  {'ok' if r.passed else 'FAIL'}")


# In[3]:

report.passed, report.wallclock


# A subset of checks and custom tolerances can be selected.

# In[4]:

small = run_suite([ModelParams(3, 0.5, 0.3, 0.5)], checks=["hamiltonian_parity", "gauge_identity"], tolerances={"gauge_identity": 1e-12})
[(r.name, r.residual, r.passed) for r in small.results]


# ## Command line
#
# The same suite is available as `sunn-reduction verify --config CONFIG.json`. The `simulate`, `spectrum` and `scan` subcommands expose the dynamics.

# In[5]:

import json
import tempfile

from sunn_reduction.cli import run_command

with tempfile.NamedTemporaryFile("w", suffix=".json", delete=False) as fh:
    json.dump({"n": 2, "samples": 5, "checks": ["omega_gram"]}, fh)
print("exit code", run_command(["verify", "--config", fh.name]))
