//! Length-prefixed binary frames for the test-management channel.
//!
//! Frame layout (all multi-byte integers big-endian):
//!
//! ```text
//! 0x4C 0x42   magic "LB"
//! 0x01        protocol version
//! type u8
//! payload_len u16
//! payload     payload_len bytes
//! ```
//!
//! Payloads by type:
//!
//! ```text
//! 0x01 HELLO            device_id u32, model_id u32, width u8
//! 0x02 HELLO_ACK        status u8 (0 new enrollment, 1 refreshed)
//! 0x10 TEST_INIT        session_id u64, scenario u8, pattern_count u32,
//!                       seed_width u8, seed bytes,
//!                       iff scenario=1: sig_width u8, signature bytes
//! 0x11 SIG_REPORT       session_id u64, sig_width u8, signature bytes
//! 0x12 VERDICT_REPORT   session_id u64, verdict u8 (0 pass, 1 fail)
//! 0x13 TEST_TRIGGER_REQ requester_id u32, target_id u32, reason u8
//! 0x7F ERROR            code u8, session_id u64
//! ```
//!
//! Bit vectors are packed least-significant-stage first, as in
//! [`BitVec::to_bytes`](crate::registers::BitVec::to_bytes). Scenario 0 is
//! signature reporting (the device returns the raw signature), scenario 1 is
//! local verdict (the expected signature travels with the init and the
//! device replies pass/fail).

use std::fmt;

use thiserror::Error;

use crate::registers::BitVec;

pub const MAGIC: [u8; 2] = [0x4C, 0x42];
pub const VERSION: u8 = 0x01;

pub const TYPE_HELLO: u8 = 0x01;
pub const TYPE_HELLO_ACK: u8 = 0x02;
pub const TYPE_TEST_INIT: u8 = 0x10;
pub const TYPE_SIG_REPORT: u8 = 0x11;
pub const TYPE_VERDICT_REPORT: u8 = 0x12;
pub const TYPE_TEST_TRIGGER_REQ: u8 = 0x13;
pub const TYPE_ERROR: u8 = 0x7F;

/// ERROR frame codes.
pub const ERR_UNKNOWN_MODEL: u8 = 0x01;
pub const ERR_WIDTH_MISMATCH: u8 = 0x02;
pub const ERR_BUSY: u8 = 0x03;
pub const ERR_UNKNOWN_SESSION: u8 = 0x04;
pub const ERR_UNKNOWN_TARGET: u8 = 0x05;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WireError {
    #[error("bad frame magic")]
    BadMagic,
    #[error("unsupported protocol version {0:#04x}")]
    BadVersion(u8),
    #[error("unknown frame type {0:#04x}")]
    UnknownType(u8),
    #[error("frame length field does not match payload ({0})")]
    LengthMismatch(String),
    #[error("malformed payload: {0}")]
    BadPayload(String),
}

/// Which side performs the signature comparison.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Scenario {
    /// Device returns the raw signature; the manager compares.
    SignatureReport,
    /// Manager ships the expected signature; the device compares and
    /// returns pass/fail.
    LocalVerdict,
}

impl Scenario {
    pub fn code(self) -> u8 {
        match self {
            Scenario::SignatureReport => 0,
            Scenario::LocalVerdict => 1,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, WireError> {
        match code {
            0 => Ok(Scenario::SignatureReport),
            1 => Ok(Scenario::LocalVerdict),
            other => Err(WireError::BadPayload(format!("bad scenario {other}"))),
        }
    }

    pub fn parse(text: &str) -> Option<Scenario> {
        match text {
            "signature-report" | "sig-report" | "sig" => Some(Scenario::SignatureReport),
            "local-verdict" | "verdict" => Some(Scenario::LocalVerdict),
            _ => None,
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::SignatureReport => "signature-report",
            Scenario::LocalVerdict => "local-verdict",
        })
    }
}

/// Why a test was requested for another device.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TriggerReason {
    CommFailure,
    Environmental,
    Operator,
}

impl TriggerReason {
    pub fn code(self) -> u8 {
        match self {
            TriggerReason::CommFailure => 0,
            TriggerReason::Environmental => 1,
            TriggerReason::Operator => 2,
        }
    }

    pub fn from_code(code: u8) -> Result<Self, WireError> {
        match code {
            0 => Ok(TriggerReason::CommFailure),
            1 => Ok(TriggerReason::Environmental),
            2 => Ok(TriggerReason::Operator),
            other => Err(WireError::BadPayload(format!("bad trigger reason {other}"))),
        }
    }

    pub fn parse(text: &str) -> Option<TriggerReason> {
        match text {
            "comm-failure" => Some(TriggerReason::CommFailure),
            "environmental" => Some(TriggerReason::Environmental),
            "operator" => Some(TriggerReason::Operator),
            _ => None,
        }
    }
}

impl fmt::Display for TriggerReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TriggerReason::CommFailure => "comm-failure",
            TriggerReason::Environmental => "environmental",
            TriggerReason::Operator => "operator",
        })
    }
}

/// A decoded protocol message.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Message {
    Hello {
        device_id: u32,
        model_id: u32,
        width: u8,
    },
    HelloAck {
        status: u8,
    },
    TestInit {
        session_id: u64,
        scenario: Scenario,
        pattern_count: u32,
        seed: BitVec,
        /// Present exactly when `scenario` is [`Scenario::LocalVerdict`].
        expected_signature: Option<BitVec>,
    },
    SigReport {
        session_id: u64,
        signature: BitVec,
    },
    VerdictReport {
        session_id: u64,
        pass: bool,
    },
    TriggerRequest {
        requester_id: u32,
        target_id: u32,
        reason: TriggerReason,
    },
    Error {
        code: u8,
        session_id: u64,
    },
}

impl Message {
    /// Serializes into one frame.
    pub fn encode(&self) -> Vec<u8> {
        let (type_tag, payload) = self.encode_payload();
        let mut frame = Vec::with_capacity(6 + payload.len());
        frame.extend_from_slice(&MAGIC);
        frame.push(VERSION);
        frame.push(type_tag);
        frame.extend_from_slice(&(payload.len() as u16).to_be_bytes());
        frame.extend_from_slice(&payload);
        frame
    }

    fn encode_payload(&self) -> (u8, Vec<u8>) {
        let mut p = Vec::new();
        match self {
            Message::Hello {
                device_id,
                model_id,
                width,
            } => {
                p.extend_from_slice(&device_id.to_be_bytes());
                p.extend_from_slice(&model_id.to_be_bytes());
                p.push(*width);
                (TYPE_HELLO, p)
            }
            Message::HelloAck { status } => {
                p.push(*status);
                (TYPE_HELLO_ACK, p)
            }
            Message::TestInit {
                session_id,
                scenario,
                pattern_count,
                seed,
                expected_signature,
            } => {
                debug_assert_eq!(
                    *scenario == Scenario::LocalVerdict,
                    expected_signature.is_some(),
                    "expected signature travels iff the verdict is local"
                );
                p.extend_from_slice(&session_id.to_be_bytes());
                p.push(scenario.code());
                p.extend_from_slice(&pattern_count.to_be_bytes());
                push_bits(&mut p, seed);
                if let Some(sig) = expected_signature {
                    push_bits(&mut p, sig);
                }
                (TYPE_TEST_INIT, p)
            }
            Message::SigReport {
                session_id,
                signature,
            } => {
                p.extend_from_slice(&session_id.to_be_bytes());
                push_bits(&mut p, signature);
                (TYPE_SIG_REPORT, p)
            }
            Message::VerdictReport { session_id, pass } => {
                p.extend_from_slice(&session_id.to_be_bytes());
                p.push(if *pass { 0 } else { 1 });
                (TYPE_VERDICT_REPORT, p)
            }
            Message::TriggerRequest {
                requester_id,
                target_id,
                reason,
            } => {
                p.extend_from_slice(&requester_id.to_be_bytes());
                p.extend_from_slice(&target_id.to_be_bytes());
                p.push(reason.code());
                (TYPE_TEST_TRIGGER_REQ, p)
            }
            Message::Error { code, session_id } => {
                p.push(*code);
                p.extend_from_slice(&session_id.to_be_bytes());
                (TYPE_ERROR, p)
            }
        }
    }

    /// One-line summary used in traces and logs.
    pub fn summary(&self) -> String {
        match self {
            Message::Hello {
                device_id,
                model_id,
                width,
            } => format!("HELLO device={device_id} model={model_id} width={width}"),
            Message::HelloAck { status } => format!("HELLO_ACK status={status}"),
            Message::TestInit {
                session_id,
                scenario,
                pattern_count,
                seed,
                expected_signature,
            } => {
                let mut s = format!(
                    "TEST_INIT session={session_id} scenario={scenario} count={pattern_count} seed={seed}"
                );
                if let Some(sig) = expected_signature {
                    s.push_str(&format!(" expected={sig}"));
                }
                s
            }
            Message::SigReport {
                session_id,
                signature,
            } => format!("SIG_REPORT session={session_id} signature={signature}"),
            Message::VerdictReport { session_id, pass } => format!(
                "VERDICT_REPORT session={session_id} verdict={}",
                if *pass { "pass" } else { "fail" }
            ),
            Message::TriggerRequest {
                requester_id,
                target_id,
                reason,
            } => format!(
                "TEST_TRIGGER_REQ requester={requester_id} target={target_id} reason={reason}"
            ),
            Message::Error { code, session_id } => {
                format!("ERROR code={code:#04x} session={session_id}")
            }
        }
    }
}

fn push_bits(out: &mut Vec<u8>, bits: &BitVec) {
    out.push(bits.width() as u8);
    out.extend_from_slice(&bits.to_bytes());
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], WireError> {
        if self.pos + n > self.buf.len() {
            return Err(WireError::BadPayload("payload truncated".into()));
        }
        let slice = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    fn u8(&mut self) -> Result<u8, WireError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, WireError> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, WireError> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn bits(&mut self) -> Result<BitVec, WireError> {
        let width = self.u8()? as usize;
        if width == 0 {
            return Err(WireError::BadPayload("zero-width bit vector".into()));
        }
        let bytes = self.take(width.div_ceil(8))?;
        BitVec::from_bytes(bytes, width).map_err(|e| WireError::BadPayload(e.to_string()))
    }

    fn finish(self) -> Result<(), WireError> {
        if self.pos != self.buf.len() {
            return Err(WireError::LengthMismatch(format!(
                "{} trailing payload bytes",
                self.buf.len() - self.pos
            )));
        }
        Ok(())
    }
}

/// Tries to decode one frame from the front of `buf`.
///
/// Returns `Ok(None)` when the buffer holds only part of a frame, and
/// `Ok(Some((message, consumed)))` once a whole frame is available.
pub fn decode_frame(buf: &[u8]) -> Result<Option<(Message, usize)>, WireError> {
    if buf.len() < 6 {
        return Ok(None);
    }
    if buf[0..2] != MAGIC {
        return Err(WireError::BadMagic);
    }
    if buf[2] != VERSION {
        return Err(WireError::BadVersion(buf[2]));
    }
    let type_tag = buf[3];
    let payload_len = u16::from_be_bytes([buf[4], buf[5]]) as usize;
    let total = 6 + payload_len;
    if buf.len() < total {
        return Ok(None);
    }
    let mut r = Reader {
        buf: &buf[6..total],
        pos: 0,
    };
    let msg = match type_tag {
        TYPE_HELLO => Message::Hello {
            device_id: r.u32()?,
            model_id: r.u32()?,
            width: r.u8()?,
        },
        TYPE_HELLO_ACK => Message::HelloAck { status: r.u8()? },
        TYPE_TEST_INIT => {
            let session_id = r.u64()?;
            let scenario = Scenario::from_code(r.u8()?)?;
            let pattern_count = r.u32()?;
            let seed = r.bits()?;
            let expected_signature = match scenario {
                Scenario::SignatureReport => None,
                Scenario::LocalVerdict => Some(r.bits()?),
            };
            Message::TestInit {
                session_id,
                scenario,
                pattern_count,
                seed,
                expected_signature,
            }
        }
        TYPE_SIG_REPORT => Message::SigReport {
            session_id: r.u64()?,
            signature: r.bits()?,
        },
        TYPE_VERDICT_REPORT => {
            let session_id = r.u64()?;
            let pass = match r.u8()? {
                0 => true,
                1 => false,
                other => return Err(WireError::BadPayload(format!("bad verdict byte {other}"))),
            };
            Message::VerdictReport { session_id, pass }
        }
        TYPE_TEST_TRIGGER_REQ => Message::TriggerRequest {
            requester_id: r.u32()?,
            target_id: r.u32()?,
            reason: TriggerReason::from_code(r.u8()?)?,
        },
        TYPE_ERROR => Message::Error {
            code: r.u8()?,
            session_id: r.u64()?,
        },
        other => return Err(WireError::UnknownType(other)),
    };
    r.finish()?;
    Ok(Some((msg, total)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(s: &str) -> BitVec {
        BitVec::parse(s).unwrap()
    }

    fn round_trip(msg: Message) {
        let frame = msg.encode();
        let (decoded, consumed) = decode_frame(&frame).unwrap().unwrap();
        assert_eq!(decoded, msg);
        assert_eq!(consumed, frame.len());
    }

    #[test]
    fn frames_round_trip() {
        round_trip(Message::Hello {
            device_id: 7,
            model_id: 1,
            width: 4,
        });
        round_trip(Message::HelloAck { status: 0 });
        round_trip(Message::TestInit {
            session_id: 42,
            scenario: Scenario::SignatureReport,
            pattern_count: 8,
            seed: bv("1011"),
            expected_signature: None,
        });
        round_trip(Message::TestInit {
            session_id: 43,
            scenario: Scenario::LocalVerdict,
            pattern_count: 8,
            seed: bv("1011"),
            expected_signature: Some(bv("0101")),
        });
        round_trip(Message::SigReport {
            session_id: 42,
            signature: bv("0101"),
        });
        round_trip(Message::VerdictReport {
            session_id: 42,
            pass: false,
        });
        round_trip(Message::TriggerRequest {
            requester_id: 3,
            target_id: 7,
            reason: TriggerReason::CommFailure,
        });
        round_trip(Message::Error {
            code: ERR_BUSY,
            session_id: 9,
        });
    }

    #[test]
    fn test_init_frame_bytes_are_pinned() {
        // Seed 1011 packs to 0x0b; header is LB, version, type, len.
        let frame = Message::TestInit {
            session_id: 1,
            scenario: Scenario::SignatureReport,
            pattern_count: 8,
            seed: bv("1011"),
            expected_signature: None,
        }
        .encode();
        assert_eq!(
            frame,
            vec![
                0x4C, 0x42, 0x01, 0x10, 0x00, 0x0F, // header, payload_len 15
                0, 0, 0, 0, 0, 0, 0, 1,    // session_id
                0x00, // scenario
                0, 0, 0, 8, // pattern_count
                0x04, 0x0b, // seed width + packed seed
            ]
        );
    }

    #[test]
    fn incomplete_frames_ask_for_more() {
        let frame = Message::HelloAck { status: 1 }.encode();
        for cut in 0..frame.len() {
            assert_eq!(decode_frame(&frame[..cut]).unwrap(), None);
        }
    }

    #[test]
    fn consecutive_frames_decode_in_sequence() {
        let mut buf = Message::HelloAck { status: 0 }.encode();
        buf.extend(
            Message::Error {
                code: ERR_UNKNOWN_SESSION,
                session_id: 5,
            }
            .encode(),
        );
        let (first, used) = decode_frame(&buf).unwrap().unwrap();
        assert_eq!(first, Message::HelloAck { status: 0 });
        let (second, _) = decode_frame(&buf[used..]).unwrap().unwrap();
        assert!(matches!(
            second,
            Message::Error {
                code: ERR_UNKNOWN_SESSION,
                ..
            }
        ));
    }

    #[test]
    fn bad_magic_version_and_type_are_rejected() {
        let mut frame = Message::HelloAck { status: 0 }.encode();
        frame[0] = 0xFF;
        assert_eq!(decode_frame(&frame), Err(WireError::BadMagic));

        let mut frame = Message::HelloAck { status: 0 }.encode();
        frame[2] = 0x02;
        assert_eq!(decode_frame(&frame), Err(WireError::BadVersion(0x02)));

        let mut frame = Message::HelloAck { status: 0 }.encode();
        frame[3] = 0x55;
        assert_eq!(decode_frame(&frame), Err(WireError::UnknownType(0x55)));
    }

    #[test]
    fn length_field_must_match_payload() {
        // HELLO payload is 9 bytes; declare 10 and pad.
        let mut frame = Message::Hello {
            device_id: 1,
            model_id: 1,
            width: 4,
        }
        .encode();
        frame[5] += 1;
        frame.push(0x00);
        assert!(matches!(
            decode_frame(&frame),
            Err(WireError::LengthMismatch(_))
        ));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_bits() -> impl Strategy<Value = BitVec> {
            proptest::collection::vec(any::<bool>(), 1..32)
                .prop_map(|bits| BitVec::new(bits).unwrap())
        }

        fn arb_message() -> impl Strategy<Value = Message> {
            prop_oneof![
                (any::<u32>(), any::<u32>(), any::<u8>()).prop_map(|(d, m, w)| Message::Hello {
                    device_id: d,
                    model_id: m,
                    width: w
                }),
                any::<u8>().prop_map(|status| Message::HelloAck { status }),
                (any::<u64>(), any::<u32>(), arb_bits()).prop_map(|(s, c, seed)| {
                    Message::TestInit {
                        session_id: s,
                        scenario: Scenario::SignatureReport,
                        pattern_count: c,
                        seed,
                        expected_signature: None,
                    }
                }),
                (any::<u64>(), any::<u32>(), arb_bits(), arb_bits()).prop_map(
                    |(s, c, seed, sig)| Message::TestInit {
                        session_id: s,
                        scenario: Scenario::LocalVerdict,
                        pattern_count: c,
                        seed,
                        expected_signature: Some(sig),
                    }
                ),
                (any::<u64>(), arb_bits()).prop_map(|(s, sig)| Message::SigReport {
                    session_id: s,
                    signature: sig
                }),
                (any::<u64>(), any::<bool>()).prop_map(|(s, pass)| Message::VerdictReport {
                    session_id: s,
                    pass
                }),
                (any::<u32>(), any::<u32>(), 0u8..3).prop_map(|(r, t, code)| {
                    Message::TriggerRequest {
                        requester_id: r,
                        target_id: t,
                        reason: TriggerReason::from_code(code).unwrap(),
                    }
                }),
                (any::<u8>(), any::<u64>()).prop_map(|(code, s)| Message::Error {
                    code,
                    session_id: s
                }),
            ]
        }

        proptest! {
            #[test]
            fn any_message_round_trips(msg in arb_message()) {
                let frame = msg.encode();
                let (decoded, consumed) = decode_frame(&frame).unwrap().unwrap();
                prop_assert_eq!(decoded, msg);
                prop_assert_eq!(consumed, frame.len());
            }
        }
    }
}
