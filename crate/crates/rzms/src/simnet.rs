//! Deterministic in-process simulator for the four-entity system model: a
//! trusted parameter issuer (TTP), n key-holding senders (BS0..BSn-1), a
//! recipient (BR), and a verifying Miner with an append-only ledger.
//!
//! One logical clock, one FIFO message queue in send order, everything
//! derived from a master seed: replaying a config reproduces the transcript
//! byte for byte. Faults are applied to in-flight messages and surface as
//! rejected outcomes in the transcript, never as errors.

use std::collections::VecDeque;

use serde::Serialize;

use crate::codec;
use crate::error::Error;
use crate::params::Params;
use crate::protocol::{
    aggregate, keygen, ms_verify, sign_share, verify_share_extract, ExtractedShare, PublicKeyShare,
    SecretKeyShare, SignOutput,
};
use crate::sampling::{expand_a, hash_h, xof_stream, Seed, DOMAIN_TRANSCRIPT};

/// Which of the model's entities an actor plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Ttp,
    Bs(usize),
    Br,
    Miner,
}

impl Role {
    fn name(&self) -> String {
        match self {
            Role::Ttp => "TTP".into(),
            Role::Bs(i) => format!("BS{i}"),
            Role::Br => "BR".into(),
            Role::Miner => "Miner".into(),
        }
    }
}

/// Protocol phase a message belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Setup,
    Keygen,
    Sign,
    Verify,
}

/// What to do to one in-flight message, addressed by its global send index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaultSpec {
    pub message_index: usize,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FaultKind {
    /// Never deliver the message.
    Drop,
    /// XOR 0xff into the payload byte at `offset` (mod payload length).
    Tamper { offset: usize },
    /// Regenerate the payload under a mismatched secret key before sending.
    WrongKey,
}

/// Full description of one session; two runs of the same config produce
/// byte-identical transcripts.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub n_signers: usize,
    /// Indices of the BSs that participate in signing (M of N).
    pub participants: Vec<usize>,
    pub master_seed: Seed,
    pub faults: Vec<FaultSpec>,
    /// The signed message, usually a mock transaction.
    pub message: Vec<u8>,
    pub params: Params,
}

/// One bus message observed by the transcript.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Event {
    pub seq: usize,
    pub phase: Phase,
    pub from: String,
    pub to: String,
    pub size: usize,
    /// Lowercase hex SHA3-256 of the payload as delivered (or as it would
    /// have been delivered, for drops).
    pub digest: String,
    /// "accepted", "rejected(<reason>)", or "dropped".
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Accepted,
    Rejected { reason: String },
}

/// Ordered record of everything that crossed the bus plus the final verdict.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    pub events: Vec<Event>,
    pub verdict: Verdict,
    /// Digests of the transactions the Miner appended (append-only).
    pub ledger: Vec<String>,
}

impl Transcript {
    /// JSON-lines export: one event per line, then the verdict line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for ev in &self.events {
            out.push_str(&serde_json::to_string(ev).expect("event serializes"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.verdict).expect("verdict serializes"));
        out.push('\n');
        out
    }
}

/// Per-phase send counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PhaseCounts {
    pub setup: usize,
    pub keygen: usize,
    pub sign: usize,
    pub verify: usize,
}

/// Counts bus messages per phase. For p participants the signing phase must
/// show exactly p*(p-1) directed messages: the one-round property.
pub fn count_messages(t: &Transcript) -> PhaseCounts {
    let mut c = PhaseCounts {
        setup: 0,
        keygen: 0,
        sign: 0,
        verify: 0,
    };
    for ev in &t.events {
        match ev.phase {
            Phase::Setup => c.setup += 1,
            Phase::Keygen => c.keygen += 1,
            Phase::Sign => c.sign += 1,
            Phase::Verify => c.verify += 1,
        }
    }
    c
}

/// Canonical length-prefixed mock transaction: sender addresses, recipient,
/// amount. Deterministic; every field must be non-empty.
pub fn build_mock_tx(
    sender_addrs: &[&str],
    recipient_addr: &str,
    amount: u64,
) -> Result<Vec<u8>, Error> {
    if sender_addrs.is_empty() {
        return Err(Error::EmptyField("sender addresses"));
    }
    if sender_addrs.iter().any(|s| s.is_empty()) {
        return Err(Error::EmptyField("sender address"));
    }
    if recipient_addr.is_empty() {
        return Err(Error::EmptyField("recipient address"));
    }
    let mut out = Vec::new();
    out.extend_from_slice(&(sender_addrs.len() as u32).to_le_bytes());
    for s in sender_addrs {
        out.extend_from_slice(&(s.len() as u32).to_le_bytes());
        out.extend_from_slice(s.as_bytes());
    }
    out.extend_from_slice(&(recipient_addr.len() as u32).to_le_bytes());
    out.extend_from_slice(recipient_addr.as_bytes());
    out.extend_from_slice(&amount.to_le_bytes());
    Ok(out)
}

/// Inverse of [`build_mock_tx`].
pub fn parse_mock_tx(bytes: &[u8]) -> Result<(Vec<String>, String, u64), Error> {
    fn take<'a>(b: &mut &'a [u8], n: usize) -> Result<&'a [u8], Error> {
        if b.len() < n {
            return Err(Error::Codec(crate::error::CodecError::Truncated {
                need: n,
                have: b.len(),
            }));
        }
        let (head, tail) = b.split_at(n);
        *b = tail;
        Ok(head)
    }
    let mut b = bytes;
    let count = u32::from_le_bytes(take(&mut b, 4)?.try_into().unwrap()) as usize;
    let mut senders = Vec::with_capacity(count.min(1024));
    for _ in 0..count {
        let len = u32::from_le_bytes(take(&mut b, 4)?.try_into().unwrap()) as usize;
        let s = std::str::from_utf8(take(&mut b, len)?)
            .map_err(|_| Error::EmptyField("sender address"))?;
        senders.push(s.to_string());
    }
    let len = u32::from_le_bytes(take(&mut b, 4)?.try_into().unwrap()) as usize;
    let recipient = std::str::from_utf8(take(&mut b, len)?)
        .map_err(|_| Error::EmptyField("recipient address"))?
        .to_string();
    let amount = u64::from_le_bytes(take(&mut b, 8)?.try_into().unwrap());
    if !b.is_empty() {
        return Err(Error::Codec(crate::error::CodecError::LengthMismatch {
            expected: bytes.len() - b.len(),
            got: bytes.len(),
        }));
    }
    Ok((senders, recipient, amount))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PayloadKind {
    Rho,
    PublicKey,
    Share { sender: usize },
    FinalSig,
    Settle,
}

struct Message {
    phase: Phase,
    from: Role,
    to: Role,
    kind: PayloadKind,
    payload: Vec<u8>,
    fault: Option<FaultKind>,
}

/// Everything the actors know, updated as deliveries happen.
struct NetState {
    bs_rho: Vec<Option<Seed>>,
    miner_rho: Option<Seed>,
    bs_keys: Vec<Option<(PublicKeyShare, SecretKeyShare)>>,
    /// pk_views[receiver][sender] = receiver's copy of sender's public key.
    pk_views: Vec<Vec<Option<PublicKeyShare>>>,
    /// extracted[receiver][sender].
    extracted: Vec<Vec<Option<ExtractedShare>>>,
    ledger: Vec<String>,
}

struct Session {
    master_seed: Seed,
    faults: Vec<FaultSpec>,
    events: Vec<Event>,
    queue: VecDeque<Message>,
    send_index: usize,
    failure: Option<String>,
}

impl Session {
    fn derive_seed(&self, nonce: u16) -> Seed {
        let mut out = [0u8; 32];
        xof_stream(&self.master_seed, DOMAIN_TRANSCRIPT, nonce).read_bytes(&mut out);
        out
    }

    fn wrong_key_pending(&self) -> bool {
        self.faults
            .iter()
            .any(|f| f.message_index == self.send_index && f.kind == FaultKind::WrongKey)
    }

    fn send(&mut self, phase: Phase, from: Role, to: Role, kind: PayloadKind, payload: Vec<u8>) {
        let fault = self
            .faults
            .iter()
            .find(|f| f.message_index == self.send_index)
            .map(|f| f.kind.clone());
        self.send_index += 1;
        self.queue.push_back(Message {
            phase,
            from,
            to,
            kind,
            payload,
            fault,
        });
    }

    fn note_failure(&mut self, reason: &str) {
        if self.failure.is_none() {
            self.failure = Some(reason.to_string());
        }
    }

    fn record(&mut self, msg: &Message, payload: &[u8], outcome: String) {
        if outcome != "accepted" {
            let reason = if outcome == "dropped" {
                "timeout"
            } else {
                match msg.kind {
                    PayloadKind::FinalSig => "miner",
                    _ => "share",
                }
            };
            self.note_failure(reason);
        }
        self.events.push(Event {
            seq: self.events.len(),
            phase: msg.phase,
            from: msg.from.name(),
            to: msg.to.name(),
            size: payload.len(),
            digest: hex::encode(hash_h(payload)),
            outcome,
        });
    }

    /// Delivers everything queued, in send order, applying in-flight faults
    /// and recording one event per message.
    fn deliver_all(&mut self, st: &mut NetState, msg_text: &[u8], params: &Params) {
        while let Some(msg) = self.queue.pop_front() {
            let mut payload = msg.payload.clone();
            match &msg.fault {
                Some(FaultKind::Drop) => {
                    self.record(&msg, &payload, "dropped".into());
                    continue;
                }
                Some(FaultKind::Tamper { offset }) => {
                    let at = offset % payload.len();
                    payload[at] ^= 0xff;
                }
                _ => {}
            }
            let outcome = deliver(&msg, &payload, st, msg_text, params);
            self.record(&msg, &payload, outcome);
        }
    }
}

/// Processes one delivered message at its receiver and reports the outcome.
fn deliver(
    msg: &Message,
    payload: &[u8],
    st: &mut NetState,
    msg_text: &[u8],
    params: &Params,
) -> String {
    match (msg.kind, msg.to) {
        (PayloadKind::Rho, Role::Bs(i)) => match payload.try_into() {
            Ok(seed) => {
                st.bs_rho[i] = Some(seed);
                "accepted".into()
            }
            Err(_) => "rejected(decode)".into(),
        },
        (PayloadKind::Rho, Role::Miner) => match payload.try_into() {
            Ok(seed) => {
                st.miner_rho = Some(seed);
                "accepted".into()
            }
            Err(_) => "rejected(decode)".into(),
        },
        (PayloadKind::PublicKey, Role::Bs(i)) => match codec::decode_pk(payload, params) {
            Ok(pk) => {
                if let Role::Bs(sender) = msg.from {
                    st.pk_views[i][sender] = Some(pk);
                }
                "accepted".into()
            }
            Err(_) => "rejected(decode)".into(),
        },
        (PayloadKind::Share { sender }, Role::Bs(i)) => {
            match codec::decode_share(payload, params) {
                Ok(share) => {
                    let Some(rho) = st.bs_rho[i] else {
                        return "rejected(decode)".into();
                    };
                    let Some((_, sk)) = st.bs_keys[i].as_ref() else {
                        return "rejected(decode)".into();
                    };
                    let Some(pk_sender) = st.pk_views[i][sender].as_ref() else {
                        return "rejected(decode)".into();
                    };
                    let a = expand_a(&rho, params).to_ntt(params);
                    match verify_share_extract(sk, pk_sender, msg_text, &share, &a, params) {
                        Ok(ex) => {
                            st.extracted[i][sender] = Some(ex);
                            "accepted".into()
                        }
                        Err(Error::ShareRejected(r)) => format!("rejected({r})"),
                        Err(_) => "rejected(decode)".into(),
                    }
                }
                Err(_) => "rejected(decode)".into(),
            }
        }
        (PayloadKind::FinalSig, Role::Miner) => {
            match (codec::decode_sig(payload, params), st.miner_rho) {
                (Ok(sig), Some(rho)) => {
                    if ms_verify(&rho, msg_text, &sig, params) {
                        st.ledger.push(hex::encode(hash_h(payload)));
                        "accepted".into()
                    } else {
                        "rejected(miner)".into()
                    }
                }
                _ => "rejected(miner)".into(),
            }
        }
        (PayloadKind::Settle, Role::Br) => "accepted".into(),
        _ => "rejected(decode)".into(),
    }
}

/// Runs one full session: setup broadcast, key generation, the single
/// signing round, extraction + aggregation by every participant, submission
/// by the lowest-index completed participant, miner verification, and (on
/// acceptance) a settlement notice to the recipient.
pub fn run_session(cfg: &SimConfig) -> Transcript {
    let params = &cfg.params;
    let n = cfg.n_signers;
    let mut participants = cfg.participants.clone();
    participants.sort_unstable();
    participants.dedup();
    assert!(
        !participants.is_empty() && participants.iter().all(|&i| i < n),
        "participant set must be a non-empty subset of the signers"
    );

    let mut sess = Session {
        master_seed: cfg.master_seed,
        faults: cfg.faults.clone(),
        events: Vec::new(),
        queue: VecDeque::new(),
        send_index: 0,
        failure: None,
    };
    let mut st = NetState {
        bs_rho: vec![None; n],
        miner_rho: None,
        bs_keys: vec![None; n],
        pk_views: vec![vec![None; n]; n],
        extracted: vec![vec![None; n]; n],
        ledger: Vec::new(),
    };

    // --- Setup: the TTP samples rho and broadcasts it to the BSs and the
    // Miner (the Miner needs it to re-expand A). ---
    let rho = sess.derive_seed(0);
    for i in 0..n {
        sess.send(
            Phase::Setup,
            Role::Ttp,
            Role::Bs(i),
            PayloadKind::Rho,
            rho.to_vec(),
        );
    }
    sess.send(
        Phase::Setup,
        Role::Ttp,
        Role::Miner,
        PayloadKind::Rho,
        rho.to_vec(),
    );
    sess.deliver_all(&mut st, &cfg.message, params);

    // --- Key generation: every BS keygens from its delivered rho and
    // broadcasts its public key to the other BSs. ---
    for i in 0..n {
        let rho_i = st.bs_rho[i].expect("setup delivered");
        let signer_seed = sess.derive_seed(1 + i as u16);
        let (pk, sk) = keygen(&rho_i, &signer_seed, params);
        st.pk_views[i][i] = Some(pk.clone());
        st.bs_keys[i] = Some((pk, sk));
    }
    for i in 0..n {
        let encoded = codec::encode_pk(&st.bs_keys[i].as_ref().unwrap().0, params);
        for j in 0..n {
            if j == i {
                continue;
            }
            let payload = if sess.wrong_key_pending() {
                let bad_seed = sess.derive_seed(900 + i as u16);
                let (bad_pk, _) = keygen(&st.bs_rho[i].unwrap(), &bad_seed, params);
                codec::encode_pk(&bad_pk, params)
            } else {
                encoded.clone()
            };
            sess.send(
                Phase::Keygen,
                Role::Bs(i),
                Role::Bs(j),
                PayloadKind::PublicKey,
                payload,
            );
        }
    }
    sess.deliver_all(&mut st, &cfg.message, params);

    // --- Signing: one round. Every participant signs once and sends exactly
    // one share to each other participant. ---
    let mut sign_outputs: Vec<Option<SignOutput>> = vec![None; n];
    for &i in &participants {
        let (pk, sk) = st.bs_keys[i].as_ref().unwrap().clone();
        let peers: Vec<PublicKeyShare> = participants
            .iter()
            .filter(|&&j| j != i)
            .map(|&j| st.pk_views[i][j].as_ref().expect("pk delivered").clone())
            .collect();
        let rng = sess.derive_seed(100 + i as u16);
        sign_outputs[i] = sign_share(&sk, &pk, &peers, &cfg.message, &rng, params).ok();
    }
    for &i in &participants {
        let Some(out) = sign_outputs[i].as_ref() else {
            continue;
        };
        let peer_list: Vec<usize> = participants.iter().copied().filter(|&j| j != i).collect();
        for (pos, &j) in peer_list.iter().enumerate() {
            let payload = if sess.wrong_key_pending() {
                // Re-sign with a mismatched secret key; peers hold the
                // original public key, so verification must fail.
                let bad_seed = sess.derive_seed(950 + i as u16);
                let (_, bad_sk) = keygen(&st.bs_rho[i].unwrap(), &bad_seed, params);
                let peers: Vec<PublicKeyShare> = peer_list
                    .iter()
                    .map(|&j| st.pk_views[i][j].as_ref().unwrap().clone())
                    .collect();
                let pk = &st.bs_keys[i].as_ref().unwrap().0;
                let rng = sess.derive_seed(100 + i as u16);
                let bad_out = sign_share(&bad_sk, pk, &peers, &cfg.message, &rng, params)
                    .expect("wrong-key signing still terminates");
                codec::encode_share(&bad_out.shares[pos], params).expect("share encodes")
            } else {
                codec::encode_share(&out.shares[pos], params).expect("share encodes")
            };
            sess.send(
                Phase::Sign,
                Role::Bs(i),
                Role::Bs(j),
                PayloadKind::Share { sender: i },
                payload,
            );
        }
    }
    sess.deliver_all(&mut st, &cfg.message, params);

    // --- Aggregation: a logical timeout fires for any participant still
    // missing a peer share once the queue has drained. ---
    let mut aggregates: Vec<Option<_>> = vec![None; n];
    for &i in &participants {
        let Some(out) = sign_outputs[i].as_ref() else {
            sess.note_failure("timeout");
            continue;
        };
        let mut exs = Vec::new();
        let mut complete = true;
        for &j in &participants {
            if j == i {
                continue;
            }
            match &st.extracted[i][j] {
                Some(ex) => exs.push(ex.clone()),
                None => complete = false,
            }
        }
        if !complete {
            sess.note_failure("timeout");
            continue;
        }
        let a = expand_a(&st.bs_rho[i].unwrap(), params).to_ntt(params);
        match aggregate(&out.nonce, &out.own_t, &exs, &cfg.message, &a, params) {
            Ok(sig) => aggregates[i] = Some(sig),
            Err(_) => sess.note_failure("share"),
        }
    }

    // --- Verification: the lowest-index participant with a completed
    // aggregate submits it; the Miner validates and appends. ---
    match participants
        .iter()
        .copied()
        .find(|&i| aggregates[i].is_some())
    {
        Some(i) => {
            let payload =
                codec::encode_sig(aggregates[i].as_ref().unwrap(), params).expect("sig encodes");
            sess.send(
                Phase::Verify,
                Role::Bs(i),
                Role::Miner,
                PayloadKind::FinalSig,
                payload,
            );
            sess.deliver_all(&mut st, &cfg.message, params);
            if !st.ledger.is_empty() {
                sess.send(
                    Phase::Verify,
                    Role::Miner,
                    Role::Br,
                    PayloadKind::Settle,
                    cfg.message.clone(),
                );
                sess.deliver_all(&mut st, &cfg.message, params);
            }
        }
        None => sess.note_failure("timeout"),
    }

    let verdict = match sess.failure {
        None if !st.ledger.is_empty() => Verdict::Accepted,
        None => Verdict::Rejected {
            reason: "miner".into(),
        },
        Some(reason) => Verdict::Rejected { reason },
    };
    Transcript {
        events: sess.events,
        verdict,
        ledger: st.ledger,
    }
}
