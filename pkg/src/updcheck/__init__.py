"""updcheck: dependency-update impact analysis for MiniLang package trees.

The toolkit answers one question — *can this dependency update affect my
project?* — by combining four ingredients:

* a class-hierarchy call graph over the client and its resolved dependencies,
* a structural AST diff that classifies how each library function changed,
* an instrumented interpreter that records which dependency functions the
  client's test suite actually exercises through project code, and
* a mutation benchmark that compares test suites against the static analysis
  as update-impact detectors.

See the README for the command-line interface; the public Python API is
re-exported here.
"""

from __future__ import annotations

__version__ = "0.1.0"
