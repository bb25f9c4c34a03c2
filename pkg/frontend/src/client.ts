/**
 * Thin WebSocket client for the gateway.
 *
 * Wraps one socket at a time: encodes outbound ClientMessages, decodes
 * inbound frames through parseServerMessage, and surfaces connection
 * status changes. The socket constructor is injectable so tests can
 * substitute a fake (or the `ws` package under node) for the browser's
 * WebSocket.
 */

import type { ClientMessage, ServerMessage } from "./protocol.js";
import { parseServerMessage } from "./protocol.js";

/**
 * The slice of the WebSocket API the client relies on. The handler
 * params are `any` so both the DOM WebSocket and node's `ws` (whose
 * event types differ in detail but agree on `.data`) fit structurally.
 */
export interface SocketLike {
  onopen: ((event: any) => void) | null;
  onclose: ((event: any) => void) | null;
  onerror: ((event: any) => void) | null;
  onmessage: ((event: any) => void) | null;
  send(data: string): void;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export type ConnectionStatus = "connecting" | "open" | "closed";

export interface GatewayClientHandlers {
  onMessage: (message: ServerMessage) => void;
  onStatus: (status: ConnectionStatus) => void;
}

export class GatewayClient {
  private socket: SocketLike | null = null;
  status: ConnectionStatus = "closed";

  constructor(
    private readonly url: string,
    private readonly handlers: GatewayClientHandlers,
    private readonly factory: SocketFactory,
  ) {}

  /** Open (or reopen) the connection, dropping any previous socket. */
  connect(): void {
    if (this.socket) {
      this.socket.onclose = null;
      this.socket.close();
    }
    const socket = this.factory(this.url);
    this.socket = socket;
    this.setStatus("connecting");
    socket.onopen = () => this.setStatus("open");
    socket.onclose = () => {
      if (this.socket === socket) {
        this.socket = null;
        this.setStatus("closed");
      }
    };
    socket.onerror = () => {
      // A failed connection also fires onclose; nothing extra to do.
    };
    socket.onmessage = (event: { data: unknown }) => {
      if (typeof event.data !== "string") {
        return;
      }
      const message = parseServerMessage(event.data);
      if (message) {
        this.handlers.onMessage(message);
      }
    };
  }

  /** True when a frame can be sent right now. */
  isOpen(): boolean {
    return this.status === "open" && this.socket !== null;
  }

  /** Send one message; returns false when the socket is not open. */
  send(message: ClientMessage): boolean {
    if (!this.isOpen() || !this.socket) {
      return false;
    }
    this.socket.send(JSON.stringify(message));
    return true;
  }

  close(): void {
    this.socket?.close();
  }

  private setStatus(status: ConnectionStatus): void {
    this.status = status;
    this.handlers.onStatus(status);
  }
}
