/** Mouse/keyboard controller emulation.
 *
 * The mouse ray stands in for the 6-DoF controller: pose_update events are
 * throttled to 60 Hz with client-side timestamps, the left button is the
 * trigger, and keys emit menu actions. While the server reports a grabbed
 * ghost, pointer motion drags the controller across the horizontal plane
 * through its grab position (Shift switches to height), with orientation
 * frozen so manipulation is translation-only. During a fill, vertical
 * pointer travel maps to controller height.
 */

import * as THREE from "three";
import type { ControllerEventWire, MenuAction, Quat, Vec3 } from "./protocol.js";

const MIN_EVENT_INTERVAL_MS = 1000 / 60;
const FILL_METERS_PER_PIXEL = 0.005;
const FORWARD = new THREE.Vector3(0, 0, -1);

export interface InputHooks {
  send(event: ControllerEventWire): void;
  isManipulating(): boolean; // any ghost currently grabbed (server state)
  isFilling(): boolean;
}

interface PoseParts {
  position: Vec3;
  orientation: Quat;
}

export class ControllerEmulator {
  private camera: THREE.PerspectiveCamera;
  private element: HTMLElement;
  private hooks: InputHooks;
  private epoch = performance.now();
  private lastSent = -Infinity;
  private lastTime = 0;
  private raycaster = new THREE.Raycaster();
  private pointer = new THREE.Vector2();
  private pointerClientY = 0;
  private triggerHeld = false;

  // controller frame frozen at trigger-down, reused for drags and fills
  private heldPosition: THREE.Vector3 | null = null;
  private heldQuat: Quat = [1, 0, 0, 0];
  private fillBase: { y: number; clientY: number } | null = null;

  constructor(camera: THREE.PerspectiveCamera, element: HTMLElement, hooks: InputHooks) {
    this.camera = camera;
    this.element = element;
    this.hooks = hooks;
    element.addEventListener("pointermove", (e) => this.onMove(e));
    element.addEventListener("pointerdown", (e) => this.onDown(e));
    element.addEventListener("pointerup", (e) => this.onUp(e));
    window.addEventListener("keydown", (e) => this.onKey(e));
  }

  private stamp(): number {
    const now = (performance.now() - this.epoch) / 1000;
    this.lastTime = Math.max(now, this.lastTime + 1e-4); // strictly increasing
    return this.lastTime;
  }

  private updatePointer(e: PointerEvent): void {
    const rect = this.element.getBoundingClientRect();
    this.pointer.x = ((e.clientX - rect.left) / rect.width) * 2 - 1;
    this.pointer.y = -((e.clientY - rect.top) / rect.height) * 2 + 1;
    this.pointerClientY = e.clientY;
  }

  private rayPose(): PoseParts {
    this.raycaster.setFromCamera(this.pointer, this.camera);
    const origin = this.raycaster.ray.origin;
    const quat = new THREE.Quaternion().setFromUnitVectors(
      FORWARD,
      this.raycaster.ray.direction.clone().normalize(),
    );
    return {
      position: [origin.x, origin.y, origin.z],
      orientation: [quat.w, quat.x, quat.y, quat.z],
    };
  }

  private dragPose(shift: boolean): PoseParts | null {
    if (!this.heldPosition) return null;
    this.raycaster.setFromCamera(this.pointer, this.camera);
    const plane = new THREE.Plane();
    if (shift) {
      const normal = this.camera.getWorldDirection(new THREE.Vector3());
      normal.y = 0;
      if (normal.lengthSq() < 1e-9) normal.set(0, 0, 1);
      plane.setFromNormalAndCoplanarPoint(normal.normalize(), this.heldPosition);
    } else {
      plane.setFromNormalAndCoplanarPoint(new THREE.Vector3(0, 1, 0), this.heldPosition);
    }
    const hit = new THREE.Vector3();
    if (!this.raycaster.ray.intersectPlane(plane, hit)) return null;
    if (!shift) hit.y = this.heldPosition.y;
    this.heldPosition = hit.clone();
    return { position: [hit.x, hit.y, hit.z], orientation: this.heldQuat };
  }

  private fillPose(): PoseParts | null {
    if (!this.fillBase) return null;
    const base = this.heldPosition ?? this.camera.position;
    const dy = (this.fillBase.clientY - this.pointerClientY) * FILL_METERS_PER_PIXEL;
    return {
      position: [base.x, this.fillBase.y + dy, base.z],
      orientation: this.heldQuat,
    };
  }

  private onMove(e: PointerEvent): void {
    this.updatePointer(e);
    if (performance.now() - this.lastSent < MIN_EVENT_INTERVAL_MS) return;
    let pose: PoseParts | null;
    if (this.hooks.isFilling()) {
      pose = this.fillPose();
    } else if (this.hooks.isManipulating() && this.triggerHeld) {
      pose = this.dragPose(e.shiftKey);
    } else if (this.triggerHeld || e.buttons === 0) {
      pose = this.rayPose(); // drawing a lasso, or just hovering
    } else {
      return; // orbiting with another button
    }
    if (!pose) return;
    this.lastSent = performance.now();
    this.hooks.send({ t: this.stamp(), kind: "pose_update", pose });
  }

  private onDown(e: PointerEvent): void {
    if (e.button !== 0) return;
    this.updatePointer(e);
    const pose = this.rayPose();
    this.heldPosition = new THREE.Vector3(...pose.position);
    this.heldQuat = pose.orientation;
    this.triggerHeld = true;
    this.hooks.send({ t: this.stamp(), kind: "pose_update", pose });
    this.hooks.send({ t: this.stamp(), kind: "trigger_down" });
  }

  private onUp(e: PointerEvent): void {
    if (e.button !== 0 || !this.triggerHeld) return;
    this.triggerHeld = false;
    this.hooks.send({ t: this.stamp(), kind: "trigger_up" });
  }

  private onKey(e: KeyboardEvent): void {
    const actions: Record<string, MenuAction> = {
      c: "commit",
      d: "set_default",
      f: "begin_fill",
      g: "end_fill",
    };
    const action = actions[e.key.toLowerCase()];
    if (action) this.menu(action);
  }

  menu(action: MenuAction): void {
    if (action === "begin_fill") {
      this.fillBase = {
        y: this.heldPosition?.y ?? this.camera.position.y,
        clientY: this.pointerClientY,
      };
    }
    if (action === "end_fill") this.fillBase = null;
    this.hooks.send({ t: this.stamp(), kind: "menu", action });
  }
}
