//! TCP runner: 4-byte big-endian length-prefixed envelope frames with the
//! same round semantics as the in-process router. Frames above 16 MiB are
//! rejected outright. The channel carries no encryption; point-to-point
//! share privacy requires an encrypted transport underneath in deployments.

use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::time::Duration;

use crate::errors::{AbortReason, Error};

use super::machines::PartyMachine;
use super::Envelope;

pub const MAX_FRAME_BYTES: usize = 16 * 1024 * 1024;
pub const DEFAULT_ROUND_TIMEOUT: Duration = Duration::from_secs(30);

pub struct FramedChannel {
    stream: TcpStream,
}

/// Binds and waits for exactly one peer.
pub fn socket_serve(addr: &str) -> Result<FramedChannel, Error> {
    let listener = TcpListener::bind(addr)?;
    let (stream, _) = listener.accept()?;
    stream.set_nodelay(true)?;
    Ok(FramedChannel { stream })
}

pub fn socket_connect(addr: &str) -> Result<FramedChannel, Error> {
    let stream = TcpStream::connect(addr)?;
    stream.set_nodelay(true)?;
    Ok(FramedChannel { stream })
}

impl FramedChannel {
    pub fn local_addr(&self) -> std::io::Result<std::net::SocketAddr> {
        self.stream.local_addr()
    }

    pub fn send(&mut self, env: &Envelope) -> Result<(), AbortReason> {
        let bytes = env.encode();
        if bytes.len() > MAX_FRAME_BYTES {
            return Err(AbortReason::FrameTooLarge);
        }
        let len = (bytes.len() as u32).to_be_bytes();
        self.stream
            .write_all(&len)
            .and_then(|()| self.stream.write_all(&bytes))
            .map_err(|_| AbortReason::ConnectionLost)
    }

    pub fn recv(&mut self, timeout: Option<Duration>) -> Result<Envelope, AbortReason> {
        self.stream
            .set_read_timeout(timeout)
            .map_err(|_| AbortReason::ConnectionLost)?;
        let mut len_bytes = [0u8; 4];
        read_exact_classified(&mut self.stream, &mut len_bytes)?;
        let len = u32::from_be_bytes(len_bytes) as usize;
        if len > MAX_FRAME_BYTES {
            return Err(AbortReason::FrameTooLarge);
        }
        let mut buf = vec![0u8; len];
        read_exact_classified(&mut self.stream, &mut buf)?;
        Envelope::decode(&buf).map_err(|_| AbortReason::MalformedMessage)
    }
}

fn read_exact_classified(stream: &mut TcpStream, buf: &mut [u8]) -> Result<(), AbortReason> {
    stream.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::WouldBlock | std::io::ErrorKind::TimedOut => AbortReason::Timeout,
        _ => AbortReason::ConnectionLost,
    })
}

/// Drives one machine over a socket against its single peer. Each round the
/// machine's envelope is sent, then the peer's is awaited.
pub fn run_over_socket(
    machine: &mut dyn PartyMachine,
    channel: &mut FramedChannel,
    round_timeout: Option<Duration>,
) -> Result<(), AbortReason> {
    let mut inbound: Vec<Envelope> = Vec::new();
    loop {
        let outbound = machine.proceed(&inbound)?;
        for env in &outbound {
            channel.send(env)?;
        }
        if machine.is_done() {
            return Ok(());
        }
        let env = channel.recv(round_timeout)?;
        inbound = vec![env];
    }
}
