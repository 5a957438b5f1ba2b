package android.graphics;

public class Picture {
    private long mNativePicture;

    /**
     * Get the height of the picture as passed to beginRecording.
     */
    public native int getHeight();
}
