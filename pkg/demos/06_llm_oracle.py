"""Configuring the HTTP oracle for an OpenAI-compatible chat endpoint.

Without ``NSTS_LLM_ENDPOINT`` set this runs against an in-process mock
transport, so no network access or API key is needed.  With a real endpoint:

    export NSTS_LLM_ENDPOINT=https://api.example.com/v1
    export NSTS_LLM_API_KEY=...
    nsts solve --program prog.pl --query 'p(X)' --oracle llm --llm-model my-model

Run with ``python demos/06_llm_oracle.py``.
"""

# %%
import json
import os

import httpx

from nsts import PromptTemplates, SearchConfig, http_llm_oracle, parse_program, parse_query, solve
from nsts.oracle import numbered_program, query_text

program = parse_program("p(X) :- q(X), r(X).\nq(a). q(b). r(b).")
query = parse_query("p(X)")

# %% The prompt the oracle receives first
print(PromptTemplates.load().render_init(numbered_program(program), query_text(query), "toy example"))


# %% A canned endpoint that answers with a correct derivation in JSON
def fake_endpoint(request: httpx.Request) -> httpx.Response:
    reply = {"solution": {"X": "b"},
             "derivation": {"goal": "p(b)", "clause": 0,
                            "children": [{"goal": "q(b)", "clause": 2, "children": []},
                                         {"goal": "r(b)", "clause": 3, "children": []}]}}
    return httpx.Response(200, json={"choices": [{"message": {"content": json.dumps(reply)}}]})


if os.environ.get("NSTS_LLM_ENDPOINT"):
    oracle = http_llm_oracle(model=os.environ.get("NSTS_LLM_MODEL", "default"))
else:
    oracle = http_llm_oracle("http://localhost:9/v1", "mock-model",
                             client=httpx.Client(transport=httpx.MockTransport(fake_endpoint)))

# %% Guesses from the model only reorder the search; answers are still checked symbolically
res = solve(program, query, oracle, SearchConfig(trace=True))
print(res.trace)
print(res.stats_json(timing=False))
oracle.close()
