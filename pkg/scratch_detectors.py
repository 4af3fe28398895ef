"""Scratch driver: one positive + one mitigated twin per detector."""
from snipscan.cpg import build_cpg
from snipscan.detectors import scan

FIXTURES = {
    "access-control-state-write": (
        """
contract Owned {
  address owner;
  function setOwner(address o) public {
    owner = o;
  }
  function withdraw() public {
    require(msg.sender == owner);
    msg.sender.transfer(address(this).balance);
  }
}
""",
        """
contract Owned {
  address owner;
  function setOwner(address o) public {
    require(msg.sender == owner);
    owner = o;
  }
  function withdraw() public {
    require(msg.sender == owner);
    msg.sender.transfer(address(this).balance);
  }
}
""",
    ),
    "access-control-selfdestruct": (
        """
contract Mortal {
  function kill() public {
    selfdestruct(msg.sender);
  }
}
""",
        """
contract Mortal {
  address owner;
  function kill() public {
    require(msg.sender == owner);
    selfdestruct(msg.sender);
  }
}
""",
    ),
    "short-address-call": (
        """
contract Pay {
  function pay(address to, uint amount) public {
    to.transfer(amount);
  }
}
""",
        """
contract Pay {
  function pay(address to, uint amount) public {
    require(msg.data.length == 68);
    to.transfer(amount);
  }
}
""",
    ),
    "short-address-state": (
        """
contract Ledger {
  mapping(address => uint) balances;
  function credit(address to, uint amount) public {
    balances[to] = amount;
  }
}
""",
        """
contract Ledger {
  mapping(address => uint) balances;
  function credit(address to, uint amount) public {
    require(msg.data.length == 68);
    balances[to] = amount;
  }
}
""",
    ),
    "bad-randomness": (
        """
contract Lottery {
  function spin() public {
    if (block.number % 2 == 0) {
      msg.sender.transfer(1 ether);
    }
  }
}
""",
        """
contract Lottery {
  function note() public {
    uint t = block.number + 1;
    t = t * 2;
  }
}
""",
    ),
    "dos-blocking-call": (
        """
contract Split {
  function payBoth(address a, address b) public {
    require(a.send(1 wei));
    b.transfer(1 wei);
  }
}
""",
        """
contract Split {
  function payBoth(address a, address b) public {
    a.send(1 wei);
    b.transfer(1 wei);
  }
}
""",
    ),
    "dos-blocking-state": (
        """
contract Auction {
  address leader;
  uint highBid;
  function bid() public payable {
    leader.transfer(highBid);
    leader = msg.sender;
    highBid = msg.value;
  }
}
""",
        """
contract Auction {
  address leader;
  uint highBid;
  function bid() public payable {
    address prev = leader;
    uint refund = highBid;
    leader = msg.sender;
    highBid = msg.value;
    prev.transfer(refund);
  }
}
""",
    ),
    "unchecked-return": (
        """
contract Remit {
  function pay(address to) public {
    to.send(1 ether);
  }
}
""",
        """
contract Remit {
  function pay(address to) public {
    require(to.send(1 ether));
  }
}
""",
    ),
    "dos-gas-loop": (
        """
contract Airdrop {
  mapping(address => uint) owed;
  function drop(address[] memory users, uint n) public {
    for (uint i = 0; i < n; i++) {
      owed[users[i]] = 1;
    }
  }
}
""",
        """
contract Airdrop {
  mapping(address => uint) owed;
  function drop(address[] memory users) public {
    for (uint i = 0; i < 10; i++) {
      owed[users[i]] = 1;
    }
  }
}
""",
    ),
    "default-proxy-delegate": (
        "function() {lib.delegatecall(msg.data);}",
        "function() { require(msg.data.length == 36); lib.delegatecall(msg.data); }",
    ),
    "dos-empty-collection": (
        """
contract Refunder {
  address[] payees;
  function reset() public {
    payees = new address[](0);
  }
  function payOut() public {
    payees[0].transfer(1 wei);
  }
}
""",
        """
contract Refunder {
  address[] payees;
  constructor() public {
    payees = new address[](0);
  }
  function payOut() public {
    payees[0].transfer(1 wei);
  }
}
""",
    ),
    "front-running": (
        """
contract Prize {
  address winner;
  function claim(uint answer) public {
    winner = msg.sender;
  }
}
""",
        """
contract Prize {
  address winner;
  function claim(uint answer) public {
    if (msg.sender == winner) {
      winner = msg.sender;
    }
  }
}
""",
    ),
    "local-struct-write": (
        """
contract Registry {
  struct Entry { uint id; address who; }
  Entry top;
  function update(uint id) public {
    Entry s;
    s.id = id;
  }
}
""",
        """
contract Registry {
  struct Entry { uint id; address who; }
  Entry top;
  function update(uint id) public {
    Entry memory s;
    s.id = id;
  }
}
""",
    ),
    "over-underflow": (
        """
contract Counter {
  uint total;
  function add(uint amount) public {
    total += amount;
  }
}
""",
        """
contract Counter {
  uint total;
  function add(uint amount) public {
    require(total + amount >= total);
    total += amount;
  }
}
""",
    ),
    "reentrancy": (
        """
contract Vault {
  mapping(address => uint) balances;
  function withdraw() public {
    uint bal = balances[msg.sender];
    msg.sender.call{value: bal}("");
    balances[msg.sender] = 0;
  }
}
""",
        """
contract Vault {
  mapping(address => uint) balances;
  function withdraw() public {
    uint bal = balances[msg.sender];
    balances[msg.sender] = 0;
    msg.sender.call{value: bal}("");
  }
}
""",
    ),
    "time-manipulation": (
        """
contract Timed {
  function ready() public {
    if (block.timestamp > 1700000000) {
      msg.sender.transfer(1 wei);
    }
  }
}
""",
        """
contract Timed {
  function note() public {
    uint t = block.timestamp;
    t = t + 1;
  }
}
""",
    ),
    "tx-origin": (
        """
contract Phish {
  address owner;
  function withdraw() public {
    require(tx.origin == owner);
    msg.sender.transfer(address(this).balance);
  }
}
""",
        """
contract Phish {
  address owner;
  function withdraw() public {
    require(msg.sender == owner);
    msg.sender.transfer(address(this).balance);
  }
}
""",
    ),
}


def main(only=None):
    bad = 0
    for det, (pos, twin) in FIXTURES.items():
        if only and det != only:
            continue
        gp = build_cpg(pos, source_id=det + "/pos")
        gt = build_cpg(twin, source_id=det + "/twin")
        rp = scan(gp, detector_ids=[det])
        rt = scan(gt, detector_ids=[det])
        ok_pos = len(rp.findings) == 1
        ok_twin = len(rt.findings) == 0
        mark = "ok  " if (ok_pos and ok_twin) else "FAIL"
        if not (ok_pos and ok_twin):
            bad += 1
        print("%s %-28s pos=%d twin=%d %s%s" % (
            mark, det, len(rp.findings), len(rt.findings),
            "" if rp.complete else " pos-incomplete",
            "" if rt.complete else " twin-incomplete"))
        if not ok_pos:
            for f in rp.findings:
                print("      pos hit line %d: %s" % (f.line, f.code))
        if not ok_twin:
            for f in rt.findings:
                print("      twin hit line %d: %s" % (f.line, f.code))
    print("failures:", bad)


if __name__ == "__main__":
    import sys
    main(sys.argv[1] if len(sys.argv) > 1 else None)
