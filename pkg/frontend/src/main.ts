import * as THREE from "three";
import { OrbitControls } from "three/addons/controls/OrbitControls.js";

import { Connection } from "./net.js";
import { ControllerEmulator } from "./input.js";
import { Hud } from "./hud.js";
import { View } from "./render.js";
import { applyMessage, grabbedGhosts, initialState } from "./state.js";
import type { ClientState } from "./state.js";

const canvas = document.querySelector<HTMLCanvasElement>("#view")!;
const panel = document.querySelector<HTMLElement>("#panel")!;

let state: ClientState = initialState();

const view = new View(canvas);
const controls = new OrbitControls(view.camera, canvas);
controls.mouseButtons = {
  LEFT: null as unknown as THREE.MOUSE, // left is the trigger
  MIDDLE: THREE.MOUSE.DOLLY,
  RIGHT: THREE.MOUSE.ROTATE,
};
controls.target.set(0, 0.3, 0);

const wsUrl = `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}/ws`;
const connection = new Connection(wsUrl, {
  onMessage(msg) {
    state = applyMessage(state, msg);
    if (state.desynced) {
      // a rev gap means we missed a frame; start over from a snapshot
      state = initialState();
      connection.resync();
    }
  },
  onOpen() {
    hud.setConnection("live");
  },
  onClose() {
    hud.setConnection("reconnecting");
    state = initialState();
  },
  onDesync() {},
});

const emulator = new ControllerEmulator(view.camera, canvas, {
  send(event) {
    connection.send(event);
  },
  isManipulating() {
    return grabbedGhosts(state).length > 0;
  },
  isFilling() {
    return state.mode === "filling";
  },
});

const hud = new Hud(panel, (action) => emulator.menu(action));

function frame(): void {
  controls.update();
  view.sync(state);
  hud.sync(state);
  view.render();
  requestAnimationFrame(frame);
}
frame();
