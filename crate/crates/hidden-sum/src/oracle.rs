//! A networked encryption oracle speaking a line-based TCP protocol.
//!
//! The server holds a cipher instance and a session key and answers
//! budgeted queries; the client implements
//! [`EncryptionOracle`](crate::attack::EncryptionOracle), so the attack in
//! `crate::attack` runs unchanged against a remote target.
//!
//! One request per line, one reply per line:
//!
//! ```text
//! -> ENC 2A        <- CIP 0F          encrypt a block
//! -> DEC 0F        <- PLA 2A          decrypt a block
//! -> BUDGET        <- REM 62 63      remaining queries (enc, dec)
//! -> QUIT          <- BYE            end the session
//! ```
//!
//! Blocks are two hex digits `00`–`3F`; the server emits uppercase and
//! accepts any case.  Refusals are `ERR budget` (allowance spent),
//! `ERR range` (valid hex above `3F`) and `ERR malformed` (anything else).
//! A refused line never terminates the session.  Budgets are per
//! connection: every session starts with the configured allowance.

use std::io::{BufRead, BufReader, ErrorKind, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread::{self, JoinHandle};
use std::time::Duration;

use crate::attack::{EncryptionOracle, DEFAULT_QUERY_BUDGET};
use crate::error::{Error, QueryKind, Result};
use crate::gf2::BitVector;
use crate::toy::{block_from_hex, block_to_hex, SessionKey, ToyCipherSpec};

// ---------------------------------------------------------------------------
// Wire grammar
// ---------------------------------------------------------------------------

/// A client line, parsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Request {
    Enc(BitVector),
    Dec(BitVector),
    Budget,
    Quit,
}

/// Refusal tokens carried by `ERR`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrToken {
    /// The per-session allowance for that direction is spent.
    Budget,
    /// The line does not parse as a request.
    Malformed,
    /// Syntactically valid hex denoting a value above `3F`.
    Range,
}

impl ErrToken {
    fn label(self) -> &'static str {
        match self {
            ErrToken::Budget => "budget",
            ErrToken::Malformed => "malformed",
            ErrToken::Range => "range",
        }
    }
}

/// A server line, parsed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Reply {
    Cip(BitVector),
    Pla(BitVector),
    Rem(u64, u64),
    Err(ErrToken),
    Bye,
}

/// Parses one request line; the error token doubles as the reply.
pub fn parse_request(line: &str) -> std::result::Result<Request, ErrToken> {
    let mut words = line.split_whitespace();
    let verb = words.next().ok_or(ErrToken::Malformed)?;
    let request = match (verb, words.next()) {
        ("ENC", Some(arg)) => Request::Enc(parse_block(arg)?),
        ("DEC", Some(arg)) => Request::Dec(parse_block(arg)?),
        ("BUDGET", None) => Request::Budget,
        ("QUIT", None) => Request::Quit,
        _ => return Err(ErrToken::Malformed),
    };
    if words.next().is_some() {
        return Err(ErrToken::Malformed);
    }
    Ok(request)
}

fn parse_block(arg: &str) -> std::result::Result<BitVector, ErrToken> {
    if arg.len() != 2 || !arg.chars().all(|c| c.is_ascii_hexdigit()) {
        return Err(ErrToken::Malformed);
    }
    block_from_hex(arg).map_err(|_| ErrToken::Range)
}

/// Renders one reply line (no terminator).
pub fn render_reply(reply: &Reply) -> String {
    match reply {
        Reply::Cip(v) => format!("CIP {}", block_to_hex(*v)),
        Reply::Pla(v) => format!("PLA {}", block_to_hex(*v)),
        Reply::Rem(enc, dec) => format!("REM {enc} {dec}"),
        Reply::Err(token) => format!("ERR {}", token.label()),
        Reply::Bye => "BYE".to_string(),
    }
}

/// Parses one reply line (client side).
pub fn parse_reply(line: &str) -> Result<Reply> {
    let bad = || Error::Protocol(format!("unparseable reply {line:?}"));
    let mut words = line.split_whitespace();
    let reply = match (words.next().ok_or_else(bad)?, words.next()) {
        ("CIP", Some(arg)) => Reply::Cip(block_from_hex(arg)?),
        ("PLA", Some(arg)) => Reply::Pla(block_from_hex(arg)?),
        ("REM", Some(arg)) => {
            let enc = arg.parse().map_err(|_| bad())?;
            let dec = words.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            return match words.next() {
                None => Ok(Reply::Rem(enc, dec)),
                Some(_) => Err(bad()),
            };
        }
        ("ERR", Some("budget")) => Reply::Err(ErrToken::Budget),
        ("ERR", Some("malformed")) => Reply::Err(ErrToken::Malformed),
        ("ERR", Some("range")) => Reply::Err(ErrToken::Range),
        ("BYE", None) => Reply::Bye,
        _ => return Err(bad()),
    };
    if words.next().is_some() {
        return Err(bad());
    }
    Ok(reply)
}

// ---------------------------------------------------------------------------
// Server
// ---------------------------------------------------------------------------

/// What a server instance defends.
#[derive(Clone)]
pub struct ServerConfig {
    pub spec: ToyCipherSpec,
    pub key: SessionKey,
    pub enc_budget: u64,
    pub dec_budget: u64,
}

impl ServerConfig {
    /// Default budgets: [`DEFAULT_QUERY_BUDGET`] per direction.
    pub fn new(spec: ToyCipherSpec, key: SessionKey) -> Self {
        ServerConfig {
            spec,
            key,
            enc_budget: DEFAULT_QUERY_BUDGET,
            dec_budget: DEFAULT_QUERY_BUDGET,
        }
    }
}

/// A running oracle server.  Dropping the handle shuts it down.
pub struct ServerHandle {
    local_addr: SocketAddr,
    shutdown: Arc<AtomicBool>,
    acceptor: Option<JoinHandle<()>>,
}

impl ServerHandle {
    /// The bound address (useful with `port 0` requests).
    pub fn local_addr(&self) -> SocketAddr {
        self.local_addr
    }

    /// Stops accepting connections and joins the accept loop.  Sessions in
    /// flight notice the flag at their next read-timeout tick.
    pub fn shutdown(mut self) {
        self.stop();
    }

    fn stop(&mut self) {
        self.shutdown.store(true, Ordering::SeqCst);
        if let Some(handle) = self.acceptor.take() {
            let _ = handle.join();
        }
    }
}

impl Drop for ServerHandle {
    fn drop(&mut self) {
        self.stop();
    }
}

/// Binds `addr` (e.g. `127.0.0.1:0` for an ephemeral port) and serves one
/// thread per connection until the handle shuts down.
pub fn serve(config: ServerConfig, addr: impl ToSocketAddrs) -> Result<ServerHandle> {
    let listener = TcpListener::bind(addr)?;
    let local_addr = listener.local_addr()?;
    listener.set_nonblocking(true)?;
    let shutdown = Arc::new(AtomicBool::new(false));
    let flag = Arc::clone(&shutdown);
    let config = Arc::new(config);
    let acceptor = thread::spawn(move || {
        while !flag.load(Ordering::SeqCst) {
            match listener.accept() {
                Ok((stream, _)) => {
                    let config = Arc::clone(&config);
                    let flag = Arc::clone(&flag);
                    thread::spawn(move || {
                        // A dropped connection is the client's business, not
                        // a server fault.
                        let _ = serve_connection(stream, &config, &flag);
                    });
                }
                Err(e) if e.kind() == ErrorKind::WouldBlock => {
                    thread::sleep(Duration::from_millis(5));
                }
                Err(_) => break,
            }
        }
    });
    Ok(ServerHandle { local_addr, shutdown, acceptor: Some(acceptor) })
}

fn serve_connection(
    stream: TcpStream,
    config: &ServerConfig,
    shutdown: &AtomicBool,
) -> Result<()> {
    stream.set_read_timeout(Some(Duration::from_millis(100)))?;
    stream.set_nodelay(true)?;
    let mut writer = stream.try_clone()?;
    let mut reader = BufReader::new(stream);
    let mut enc_left = config.enc_budget;
    let mut dec_left = config.dec_budget;
    let mut line = String::new();
    loop {
        line.clear();
        match reader.read_line(&mut line) {
            Ok(0) => return Ok(()), // peer closed
            Ok(_) => {}
            Err(e) if matches!(e.kind(), ErrorKind::WouldBlock | ErrorKind::TimedOut) => {
                if shutdown.load(Ordering::SeqCst) {
                    return Ok(());
                }
                continue;
            }
            Err(e) => return Err(e.into()),
        }
        let reply = match parse_request(&line) {
            Err(token) => Reply::Err(token),
            Ok(Request::Enc(v)) => {
                if enc_left == 0 {
                    Reply::Err(ErrToken::Budget)
                } else {
                    enc_left -= 1;
                    Reply::Cip(config.spec.encrypt(v, &config.key))
                }
            }
            Ok(Request::Dec(v)) => {
                if dec_left == 0 {
                    Reply::Err(ErrToken::Budget)
                } else {
                    dec_left -= 1;
                    Reply::Pla(config.spec.decrypt(v, &config.key))
                }
            }
            Ok(Request::Budget) => Reply::Rem(enc_left, dec_left),
            Ok(Request::Quit) => {
                writeln!(writer, "{}", render_reply(&Reply::Bye))?;
                return Ok(());
            }
        };
        writeln!(writer, "{}", render_reply(&reply))?;
    }
}

// ---------------------------------------------------------------------------
// Client
// ---------------------------------------------------------------------------

/// A TCP client for the oracle protocol, usable wherever a
/// [`LocalOracle`](crate::attack::LocalOracle) is.
pub struct OracleClient {
    reader: BufReader<TcpStream>,
    writer: TcpStream,
    enc_budget: u64,
    dec_budget: u64,
    enc_used: u64,
    dec_used: u64,
}

impl OracleClient {
    /// Connects and learns the session allowance with an initial `BUDGET`
    /// exchange.
    pub fn connect(addr: impl ToSocketAddrs) -> Result<Self> {
        let stream = TcpStream::connect(addr)?;
        stream.set_nodelay(true)?;
        let reader = BufReader::new(stream.try_clone()?);
        let mut client = OracleClient {
            reader,
            writer: stream,
            enc_budget: 0,
            dec_budget: 0,
            enc_used: 0,
            dec_used: 0,
        };
        let (enc, dec) = client.budget()?;
        client.enc_budget = enc;
        client.dec_budget = dec;
        Ok(client)
    }

    fn round_trip(&mut self, request: &str) -> Result<Reply> {
        writeln!(self.writer, "{request}")?;
        let mut line = String::new();
        if self.reader.read_line(&mut line)? == 0 {
            return Err(Error::Protocol("server closed the connection".into()));
        }
        parse_reply(line.trim_end())
    }

    /// Remaining queries as `(enc, dec)`.
    pub fn budget(&mut self) -> Result<(u64, u64)> {
        match self.round_trip("BUDGET")? {
            Reply::Rem(enc, dec) => Ok((enc, dec)),
            other => Err(Error::Protocol(format!("expected REM, got {other:?}"))),
        }
    }

    /// Ends the session politely.
    pub fn quit(mut self) -> Result<()> {
        match self.round_trip("QUIT")? {
            Reply::Bye => Ok(()),
            other => Err(Error::Protocol(format!("expected BYE, got {other:?}"))),
        }
    }

    fn exchange(&mut self, kind: QueryKind, block: BitVector) -> Result<BitVector> {
        let verb = match kind {
            QueryKind::Enc => "ENC",
            QueryKind::Dec => "DEC",
        };
        let reply = self.round_trip(&format!("{verb} {}", block_to_hex(block)))?;
        let (used, budget) = match kind {
            QueryKind::Enc => (&mut self.enc_used, self.enc_budget),
            QueryKind::Dec => (&mut self.dec_used, self.dec_budget),
        };
        match (kind, reply) {
            (QueryKind::Enc, Reply::Cip(v)) | (QueryKind::Dec, Reply::Pla(v)) => {
                *used += 1;
                Ok(v)
            }
            (_, Reply::Err(ErrToken::Budget)) => {
                Err(Error::BudgetExhausted { kind, used: *used, budget })
            }
            (_, other) => Err(Error::Protocol(format!("unexpected reply {other:?}"))),
        }
    }
}

impl EncryptionOracle for OracleClient {
    fn encrypt(&mut self, plaintext: BitVector) -> Result<BitVector> {
        self.exchange(QueryKind::Enc, plaintext)
    }

    fn decrypt(&mut self, ciphertext: BitVector) -> Result<BitVector> {
        self.exchange(QueryKind::Dec, ciphertext)
    }

    fn counts(&self) -> (u64, u64) {
        (self.enc_used, self.dec_used)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(bits: u16) -> BitVector {
        BitVector::new(6, bits)
    }

    #[test]
    fn requests_parse() {
        assert_eq!(parse_request("ENC 3F"), Ok(Request::Enc(block(0x3F))));
        assert_eq!(parse_request("ENC 3f"), Ok(Request::Enc(block(0x3F))), "hex is case-insensitive");
        assert_eq!(parse_request("DEC 00"), Ok(Request::Dec(block(0))));
        assert_eq!(parse_request("  BUDGET  "), Ok(Request::Budget));
        assert_eq!(parse_request("QUIT"), Ok(Request::Quit));
    }

    #[test]
    fn requests_refuse_with_the_right_token() {
        // Out-of-range block values.
        assert_eq!(parse_request("ENC 40"), Err(ErrToken::Range));
        assert_eq!(parse_request("DEC FF"), Err(ErrToken::Range));
        // Everything else is malformed.
        for line in [
            "", "ENC", "ENC 3", "ENC 123", "ENC zz", "ENC 0A 0B", "enc 0A", "BUDGET now",
            "QUIT 0A", "HELLO",
        ] {
            assert_eq!(parse_request(line), Err(ErrToken::Malformed), "line {line:?}");
        }
    }

    #[test]
    fn replies_render_and_parse_back() {
        let replies = [
            Reply::Cip(block(0x2A)),
            Reply::Pla(block(0)),
            Reply::Rem(62, 63),
            Reply::Err(ErrToken::Budget),
            Reply::Err(ErrToken::Malformed),
            Reply::Err(ErrToken::Range),
            Reply::Bye,
        ];
        for reply in replies {
            let line = render_reply(&reply);
            assert_eq!(parse_reply(&line).unwrap(), reply, "line {line:?}");
        }
        assert_eq!(render_reply(&Reply::Cip(block(0x0F))), "CIP 0F", "uppercase hex");
    }

    #[test]
    fn bad_replies_are_protocol_errors() {
        for line in ["", "CIP", "CIP 4A", "REM 1", "REM 1 2 3", "ERR sad", "BYE now", "YES"] {
            assert!(parse_reply(line).is_err(), "line {line:?}");
        }
    }
}
