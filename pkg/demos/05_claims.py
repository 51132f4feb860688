"""Run the numbered claims and print the report."""
from __future__ import annotations

from adamsext.claims import format_report, run_claims

results = run_claims(progress=lambda cid, secs: print(f"{cid} done in {secs:.1f}s"))
print(format_report(results))
