public class Main {
  public static void main(String[] args) {
    int t 2;
    if (t < 3 {
      t = 0;
    } else t = 1;
  }
}
