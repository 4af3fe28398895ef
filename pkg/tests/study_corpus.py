"""Bundled mini-study corpus: 10 snippets and 12 contracts.

Three snippets are vulnerable (tx-origin, reentrancy, unchecked-return),
one is JavaScript, one pair differs only in comments, the rest are
benign Solidity. Six contracts are clones of the vulnerable snippets
(four keep the flaw, two mitigate it) and six are unrelated. Timestamps
are arranged so the reentrancy snippet has one older containing contract
(Disseminator but not Source) while the other two are Source snippets.

HAND_COUNTS freezes the funnel every study run must reproduce; each
value was counted by hand from the rows below before the pipeline ever
ran on them.
"""

import json

SNIPPETS = [
    ("s01", "ethereum.stackexchange.com", "q100", "2020-01-10T00:00:00Z", 100,
     'contract Switch {\n  address owner;\n  bool paused;\n  uint tally;\n'
     '  function halt() public {\n    require(tx.origin == owner);\n'
     '    paused = true;\n    tally = tally + 1;\n  }\n}'),
    ("s02", "ethereum.stackexchange.com", "q200", "2020-02-15T00:00:00Z", 250,
     'contract Vault {\n  mapping(address => uint) balances;\n'
     '  function withdraw() public {\n    uint bal = balances[msg.sender];\n'
     '    require(bal > 0);\n    bool ok = msg.sender.call{value: bal}("");\n'
     '    balances[msg.sender] = 0;\n    require(ok);\n  }\n}'),
    ("s03", "stackoverflow.com", "q300", "2020-03-20T00:00:00Z", 50,
     'contract Remit {\n  function pay(address to) public {\n'
     '    to.send(1 ether);\n  }\n}'),
    ("s04", "stackoverflow.com", "q400", "2020-04-01T00:00:00Z", 10,
     'const sum = (a, b) => a + b;\nconsole.log(sum(2, 3));'),
    ("s05", "ethereum.stackexchange.com", "q500", "2020-04-05T00:00:00Z", 70,
     'contract Tally {\n  uint total;\n  function bump() public {\n'
     '    total = total + 1;\n  }\n}'),
    ("s06", "ethereum.stackexchange.com", "q600", "2020-04-09T00:00:00Z", 30,
     'contract Tally {\n  uint total;// counts upward only\n'
     '  function bump() public {\n    total = total/* one step */ + 1;\n  }\n}'),
    ("s07", "stackoverflow.com", "q700", "2020-05-01T00:00:00Z", 20,
     'contract Box {\n  uint stored;\n'
     '  function peek() public view returns (uint) {\n    return stored;\n  }\n}'),
    ("s08", "ethereum.stackexchange.com", "q800", "2020-05-02T00:00:00Z", 15,
     'contract Beacon {\n  event Ping(address who);\n'
     '  function ping() public {\n    emit Ping(msg.sender);\n  }\n}'),
    ("s09", "stackoverflow.com", "q900", "2020-05-03T00:00:00Z", 25,
     'contract Mirror {\n  function same(uint a) public pure returns (uint) {\n'
     '    return a;\n  }\n}'),
    ("s10", "ethereum.stackexchange.com", "q1000", "2020-06-01T00:00:00Z", 40,
     'pragma solidity ^0.8.4;\ncontract Adder {\n  uint total;\n'
     '  function add(uint v) public {\n    total += v;\n  }\n}'),
]

CONTRACTS = [
    # clones of s01: c01 keeps tx.origin, c02 switches to msg.sender
    ("c01", "2020-06-15T00:00:00Z",
     'contract Breaker { address admin; bool stopped; uint hits; '
     'function freeze() public { require(tx.origin == admin); '
     'stopped = true; hits = hits + 1; } }'),
    ("c02", "2020-07-01T00:00:00Z",
     'contract Gate { address keeper; bool shut; uint uses; '
     'function close() public { require(msg.sender == keeper); '
     'shut = true; uses = uses + 1; } }'),
    # clones of s02; c03 is deployed BEFORE the snippet was posted
    ("c03", "2019-12-01T00:00:00Z",
     'contract Pool { mapping(address => uint) book; '
     'function take() public { uint due = book[msg.sender]; '
     'require(due > 0); bool sent = msg.sender.call{value: due}(""); '
     'book[msg.sender] = 0; require(sent); } }'),
    ("c04", "2020-08-01T00:00:00Z",
     'contract Bank { mapping(address => uint) ledger; '
     'function redeem() public { uint owedNow = ledger[msg.sender]; '
     'require(owedNow > 0); bool fine = msg.sender.call{value: owedNow}(""); '
     'ledger[msg.sender] = 0; require(fine); } }'),
    # clones of s03: c05 keeps the bare send, c06 wraps it in require
    ("c05", "2020-09-01T00:00:00Z",
     'contract Payout { function settle(address dest) public { '
     'dest.send(1 ether); } }'),
    ("c06", "2020-10-01T00:00:00Z",
     'contract Refund { function give(address who) public { '
     'require(who.send(1 ether)); } }'),
    # unrelated deployments
    ("c07", "2021-01-01T00:00:00Z",
     'contract Token {\n  mapping(address => uint) balances;\n  uint supply;\n'
     '  function mint(address to, uint amount) public {\n'
     '    supply = supply + amount;\n'
     '    balances[to] = balances[to] + amount;\n  }\n'
     '  function balanceOf(address who) public view returns (uint) {\n'
     '    return balances[who];\n  }\n}'),
    ("c08", "2021-02-01T00:00:00Z",
     'contract Registry {\n  mapping(bytes32 => address) entries;\n'
     '  event Registered(bytes32 name, address target);\n'
     '  function register(bytes32 name, address target) public {\n'
     '    require(entries[name] == address(0));\n    entries[name] = target;\n'
     '    emit Registered(name, target);\n  }\n}'),
    ("c09", "2021-03-01T00:00:00Z",
     'contract Quorum {\n  uint yes;\n  uint no;\n  uint deadline;\n'
     '  function vote(bool support) public {\n'
     '    require(block.timestamp < deadline);\n'
     '    if (support) { yes = yes + 1; } else { no = no + 1; }\n  }\n'
     '  function passed() public view returns (bool) {\n'
     '    return yes > no;\n  }\n}'),
    ("c10", "2021-04-01T00:00:00Z",
     'library Math {\n  function min(uint a, uint b) internal pure returns (uint) {\n'
     '    if (a < b) { return a; }\n    return b;\n  }\n'
     '  function max(uint a, uint b) internal pure returns (uint) {\n'
     '    if (a > b) { return a; }\n    return b;\n  }\n}'),
    ("c11", "2021-05-01T00:00:00Z",
     'contract Escrow {\n  address buyer;\n  address seller;\n  uint amount;\n'
     '  bool released;\n  constructor(address s) public payable {\n'
     '    buyer = msg.sender;\n    seller = s;\n    amount = msg.value;\n  }\n'
     '  function release() public {\n    require(msg.sender == buyer);\n'
     '    require(!released);\n    released = true;\n  }\n}'),
    ("c12", "2021-06-01T00:00:00Z",
     'contract Oracle {\n  uint price;\n  address feeder;\n'
     '  modifier onlyFeeder() { require(msg.sender == feeder); _; }\n'
     '  function push(uint p) public onlyFeeder {\n    price = p;\n  }\n'
     '  function read() public view returns (uint) {\n    return price;\n  }\n}'),
]

# Expected clone links: snippet -> {contract: temporal class}. c03 is
# older than s02, so s02 is Disseminator via c04 but not Source.
EXPECTED_LINKS = {
    "s01": {"c01": "Source", "c02": "Source"},
    "s02": {"c03": "All", "c04": "Disseminator"},
    "s03": {"c05": "Source", "c06": "Source"},
}

# Validation outcomes per disseminator link (contract still vulnerable?)
EXPECTED_VULNERABLE = {"c01": True, "c02": False, "c04": True,
                       "c05": True, "c06": False}

HAND_COUNTS = {
    "snippets": {
        "unique": 8,                     # 10 - JavaScript s04 - duplicate s06
        "vulnerable": 3,
        "containedInContracts": 3,
        "postedBeforeDeployment": {"disseminator": 3, "source": 2},
    },
    "contracts": {
        "containingVulnerableSnippets": {"disseminator": 5, "source": 4},
        "unique": {"disseminator": 5, "source": 4},
    },
    "validation": {
        "vulnerableContracts": {"disseminator": 3, "source": 2},
        "vulnerableSnippetsInVulnerableContracts": {"disseminator": 3,
                                                    "source": 2},
    },
}


def write_corpus(directory):
    """Write snippets.jsonl and contracts.jsonl under directory."""
    spath = str(directory) + "/snippets.jsonl"
    cpath = str(directory) + "/contracts.jsonl"
    with open(spath, "w", encoding="utf-8") as fh:
        for sid, site, post_id, created, views, code in SNIPPETS:
            fh.write(json.dumps({
                "id": sid, "site": site, "postId": post_id,
                "createdAt": created, "views": views, "code": code}) + "\n")
    with open(cpath, "w", encoding="utf-8") as fh:
        for i, (cid, deployed, code) in enumerate(CONTRACTS):
            fh.write(json.dumps({
                "id": cid, "address": "0x" + ("%040x" % (i + 1)),
                "deployedAt": deployed, "compilerVersion": "v0.5.17",
                "code": code}) + "\n")
    return spath, cpath
